#ifndef FRACDIM_FRACDIM_HPP
#define FRACDIM_FRACDIM_HPP

// Correlation-dimension estimation of class boundaries and the mixup-based
// decision-boundary complexity measure.

#include "classifier.hpp"
#include "dataset.hpp"
#include "dataset_io.hpp"
#include "dimension.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "measure.hpp"
#include "mixup.hpp"
#include "paircount.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "serialize.hpp"
#include "synth.hpp"

#endif
