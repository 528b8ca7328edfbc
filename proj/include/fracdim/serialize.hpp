#ifndef FRACDIM_SERIALIZE_HPP
#define FRACDIM_SERIALIZE_HPP

#include <cstdio>
#include <cstdlib>
#include <string>

#include <nlohmann/json.hpp>

#include "dimension.hpp"
#include "eval.hpp"
#include "measure.hpp"
#include "mixup.hpp"
#include "paircount.hpp"

namespace fracdim {

using nlohmann::json;

/// Rounds to 12 significant digits; the shortest representation of the
/// result is what gets printed.
inline double round_significant(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::strtod(buf, nullptr);
}

inline void canonicalize(json& j) {
    if (j.is_number_float()) {
        j = round_significant(j.get<double>());
    } else if (j.is_structured()) {
        for (auto& child : j) canonicalize(child);
    }
}

/// Sorted keys (nlohmann objects are ordered maps), 12 significant digits,
/// two-space indent, trailing newline.
inline std::string canonical_dump(json j) {
    canonicalize(j);
    return j.dump(2) + "\n";
}

inline json to_json(const RadiusSet& set) {
    return {{"radii", set.radii}, {"percentile_lo", set.percentile_lo}, {"percentile_hi", set.percentile_hi},
            {"num_scales", set.num_scales()}};
}

inline json to_json(const LogLogFit& fit) {
    return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared},
            {"points_used", fit.points_used}};
}

inline json to_json(const DimensionEstimate& est, bool per_batch = false) {
    json j = {{"mean_slope", est.mean_slope},
              {"slope_std", est.slope_std},
              {"batches_valid", est.batches_valid},
              {"batches_requested", est.batches_requested},
              {"invalid_no_cross_pairs", est.no_cross_pairs},
              {"invalid_insufficient_counts", est.insufficient_counts}};
    if (per_batch) {
        json list = json::array();
        for (const auto& b : est.per_batch) {
            json item = to_json(b.fit);
            item["batch"] = b.batch_index;
            list.push_back(item);
        }
        j["per_batch"] = list;
    }
    return j;
}

inline json to_json(const MixupConfig& mixup) {
    json j = {{"lambda_dist", to_string(mixup.lambda.kind)}, {"include_originals", mixup.include_originals}};
    if (mixup.lambda.kind == LambdaKind::Beta) j["alpha"] = mixup.lambda.alpha;
    if (mixup.lambda.kind == LambdaKind::Constant) j["lambda"] = mixup.lambda.value;
    if (mixup.virtual_per_batch) {
        j["virtual_per_batch"] = *mixup.virtual_per_batch;
    } else {
        j["virtual_per_batch"] = "batch_size";
    }
    return j;
}

/// Echo of the settings that determine the result (thread count excluded).
inline json to_json(const MeasureConfig& config) {
    return {{"num_batches", config.num_batches},
            {"batch_size", config.batch_size},
            {"percentile_lo", config.percentile_lo},
            {"percentile_hi", config.percentile_hi},
            {"num_scales", config.num_scales},
            {"pilot_pairs", config.pilot_pairs},
            {"seed", config.seed.value},
            {"mixup", to_json(config.mixup)}};
}

inline json to_json(const MeasureResult& result, const MeasureConfig& config, bool per_batch = false) {
    return {{"m", result.m},
            {"d2_data", to_json(result.d2_data, per_batch)},
            {"d2_mixup", to_json(result.d2_mixup, per_batch)},
            {"radius_set", to_json(result.radius_set)},
            {"config", to_json(config)}};
}

inline json to_json(const CmiScore& score) {
    return {{"bits", score.bits},
            {"num_records", score.num_records},
            {"num_groups", score.num_groups},
            {"dropped_groups", score.dropped_groups},
            {"dropped_records", score.dropped_records}};
}

inline json to_json(const SweepReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json r = {{"num_batches", row.config.num_batches},
                  {"batch_size", row.config.batch_size},
                  {"percentile_range", percentile_range_label(row.config.percentile_lo, row.config.percentile_hi)},
                  {"percentile_lo", row.config.percentile_lo},
                  {"percentile_hi", row.config.percentile_hi}};
        r["score"] = row.score ? to_json(*row.score) : json(nullptr);
        if (!row.note.empty()) r["note"] = row.note;
        rows.push_back(r);
    }
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"config_index", c.config_index},
                         {"model_id", c.record.model_id},
                         {"measure", c.record.measure},
                         {"gap", c.record.gap},
                         {"group", c.record.group},
                         {"status", c.status}});
    }
    return {{"scoring", "plug-in conditional mutual information, median-binarized, conditioned on group"},
            {"rows", rows},
            {"records", cells}};
}

/// CSV of mean pair counts per radius for the two passes of a measure run.
inline std::string format_measure_curves_csv(const MeasureResult& result) {
    const auto data = result.d2_data.mean_counts();
    const auto mix = result.d2_mixup.mean_counts();
    std::string out = "r,count_data,count_mixup\n";
    for (std::size_t k = 0; k < result.radius_set.radii.size(); ++k) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", result.radius_set.radii[k], data[k], mix[k]);
        out += buf;
    }
    return out;
}

/// "r,count" CSV of mean counts per radius over the valid batches.
inline std::string format_mean_curve_csv(const DimensionEstimate& est) {
    const auto counts = est.mean_counts();
    std::string out = "r,count\n";
    for (std::size_t k = 0; k < est.radii.size(); ++k) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", est.radii[k], counts[k]);
        out += buf;
    }
    return out;
}

}  // namespace fracdim

#endif
