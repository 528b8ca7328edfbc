#ifndef FRACDIM_EVAL_HPP
#define FRACDIM_EVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "classifier.hpp"
#include "dataset.hpp"
#include "dataset_io.hpp"
#include "error.hpp"
#include "measure.hpp"

namespace fracdim {

struct EvalRecord {
    std::string model_id;
    double measure = 0.0;
    double gap = 0.0;
    std::string group;

    friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct CmiScore {
    double bits = 0.0;
    std::size_t num_records = 0;  // records that entered the estimate
    std::size_t num_groups = 0;
    std::size_t dropped_groups = 0;  // groups with fewer than 2 records
    std::size_t dropped_records = 0;
};

inline double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// Plug-in I(measure; gap | group) in bits, with measure and gap each
/// binarized at their median over the usable records (strictly above the
/// median is 1).
///
/// Simplified stand-in for competition scoring: one median split per
/// variable and no minimum over hyperparameter subsets.
inline CmiScore conditional_mutual_information(const std::vector<EvalRecord>& records) {
    if (records.size() < 4) {
        fail(ErrorCode::InsufficientRecords, "need at least 4 records, got " + std::to_string(records.size()));
    }
    std::map<std::string, std::vector<const EvalRecord*>> groups;
    for (const auto& r : records) {
        if (!std::isfinite(r.measure) || !std::isfinite(r.gap)) {
            fail(ErrorCode::NonFiniteInput, "record '" + r.model_id + "' has a non-finite value");
        }
        groups[r.group].push_back(&r);
    }
    CmiScore score;
    std::vector<const EvalRecord*> usable;
    for (auto it = groups.begin(); it != groups.end();) {
        if (it->second.size() < 2) {
            ++score.dropped_groups;
            score.dropped_records += it->second.size();
            it = groups.erase(it);
        } else {
            usable.insert(usable.end(), it->second.begin(), it->second.end());
            ++it;
        }
    }
    if (usable.size() < 4) {
        fail(ErrorCode::InsufficientRecords,
             "need at least 4 records in groups of size >= 2, got " + std::to_string(usable.size()));
    }
    std::vector<double> measures, gaps;
    for (const auto* r : usable) {
        measures.push_back(r->measure);
        gaps.push_back(r->gap);
    }
    const double measure_median = median(measures);
    const double gap_median = median(gaps);

    const double total = static_cast<double>(usable.size());
    double bits = 0.0;
    for (const auto& [name, members] : groups) {
        double joint[2][2] = {{0, 0}, {0, 0}};
        for (const auto* r : members) joint[r->measure > measure_median][r->gap > gap_median] += 1.0;
        const double size = static_cast<double>(members.size());
        const double pm[2] = {(joint[0][0] + joint[0][1]) / size, (joint[1][0] + joint[1][1]) / size};
        const double pg[2] = {(joint[0][0] + joint[1][0]) / size, (joint[0][1] + joint[1][1]) / size};
        double group_bits = 0.0;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double p = joint[a][b] / size;
                if (p > 0.0) group_bits += p * std::log2(p / (pm[a] * pg[b]));
            }
        }
        bits += (size / total) * group_bits;
    }
    score.bits = bits < 1e-12 ? 0.0 : bits;
    score.num_records = usable.size();
    score.num_groups = groups.size();
    return score;
}

// --- record and ground-truth files -----------------------------------------

inline std::vector<EvalRecord> parse_records_csv(std::string_view text) {
    std::vector<EvalRecord> out;
    std::size_t line_no = 0, start = 0;
    bool header_seen = false;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (!header_seen) {
            header_seen = true;
            if (line != "model_id,measure,gap,group") {
                throw RowError(ErrorCode::MalformedValue, line_no, "expected header 'model_id,measure,gap,group'");
            }
            continue;
        }
        if (fields.size() != 4) {
            throw RowError(ErrorCode::MalformedValue, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        }
        EvalRecord r;
        r.model_id = std::string(detail::trim(fields[0]));
        r.group = std::string(detail::trim(fields[3]));
        if (!detail::parse_double(fields[1], r.measure) || !std::isfinite(r.measure)) {
            throw RowError(ErrorCode::MalformedValue, line_no, "invalid measure '" + std::string(fields[1]) + "'");
        }
        if (!detail::parse_double(fields[2], r.gap) || !std::isfinite(r.gap)) {
            throw RowError(ErrorCode::MalformedValue, line_no, "invalid gap '" + std::string(fields[2]) + "'");
        }
        out.push_back(std::move(r));
    }
    if (!header_seen) throw RowError(ErrorCode::MalformedValue, 1, "empty records file");
    return out;
}

inline std::string format_records_csv(const std::vector<EvalRecord>& records) {
    std::string out = "model_id,measure,gap,group\n";
    for (const auto& r : records) {
        out += r.model_id + "," + detail::format_double(r.measure) + "," + detail::format_double(r.gap) + "," + r.group +
               "\n";
    }
    return out;
}

struct GroundTruth {
    double gap = 0.0;
    std::string group = "all";
};

/// "model_id,gap" with an optional third "group" column (default "all").
inline std::map<std::string, GroundTruth> parse_gaps_csv(std::string_view text) {
    std::map<std::string, GroundTruth> out;
    std::size_t line_no = 0, start = 0;
    bool header_seen = false, has_group = false;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = detail::trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split(line, ',');
        if (!header_seen) {
            header_seen = true;
            if (line == "model_id,gap,group") {
                has_group = true;
            } else if (line != "model_id,gap") {
                throw RowError(ErrorCode::MalformedValue, line_no, "expected header 'model_id,gap[,group]'");
            }
            continue;
        }
        if (fields.size() != (has_group ? 3u : 2u)) {
            throw RowError(ErrorCode::MalformedValue, line_no, "wrong number of fields");
        }
        GroundTruth truth;
        if (!detail::parse_double(fields[1], truth.gap) || !std::isfinite(truth.gap)) {
            throw RowError(ErrorCode::MalformedValue, line_no, "invalid gap '" + std::string(fields[1]) + "'");
        }
        if (has_group) truth.group = std::string(detail::trim(fields[2]));
        out[std::string(detail::trim(fields[0]))] = truth;
    }
    return out;
}

// --- sweeps -----------------------------------------------------------------

struct SweepModel {
    std::string id;
    const Classifier* classifier = nullptr;
};

/// Stand-in measure for a model whose measure is undefined (e.g. no
/// cross-class pairs under its labels): ranks as the worst possible value.
inline constexpr double kWorstMeasure = std::numeric_limits<double>::max();

struct SweepCell {
    std::size_t config_index = 0;
    EvalRecord record;
    std::string status = "ok";  // or the error code that made the measure undefined
};

struct SweepRow {
    MeasureConfig config;
    std::optional<CmiScore> score;  // empty when too few records to score
    std::string note;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    std::vector<SweepRow> rows;

    std::vector<EvalRecord> records() const {
        std::vector<EvalRecord> out;
        for (const auto& c : cells) out.push_back(c.record);
        return out;
    }
};

inline bool is_degenerate(ErrorCode code) {
    return code == ErrorCode::TooManyInvalidBatches || code == ErrorCode::DegenerateBaseDimension ||
           code == ErrorCode::DegenerateScale;
}

/// One record per (model, config); each config row is scored over its models.
inline SweepReport run_sweep(const Dataset& dataset, const std::vector<SweepModel>& models,
                             const std::vector<MeasureConfig>& configs,
                             const std::map<std::string, GroundTruth>& ground_truth) {
    for (const auto& model : models) {
        if (!ground_truth.contains(model.id)) {
            fail(ErrorCode::MissingGroundTruth, "no generalization gap for model '" + model.id + "'");
        }
        if (model.classifier == nullptr) fail(ErrorCode::InvalidArgument, "model '" + model.id + "' has no classifier");
    }
    SweepReport report;
    if (models.empty()) return report;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::vector<EvalRecord> row_records;
        for (const auto& model : models) {
            const auto& truth = ground_truth.at(model.id);
            SweepCell cell{c, {model.id, 0.0, truth.gap, truth.group}, "ok"};
            try {
                cell.record.measure = compute_measure(dataset, *model.classifier, configs[c]).m;
            } catch (const Error& e) {
                if (!is_degenerate(e.code())) throw;
                cell.record.measure = kWorstMeasure;
                cell.status = std::string(to_string(e.code()));
            }
            row_records.push_back(cell.record);
            report.cells.push_back(std::move(cell));
        }
        SweepRow row{configs[c], std::nullopt, ""};
        try {
            row.score = conditional_mutual_information(row_records);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::InsufficientRecords) throw;
            row.note = "insufficient records";
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline std::string percentile_range_label(double lo, double hi) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%g; %g]", lo, hi);
    return buf;
}

/// Aligned text table: one row per configuration.
inline std::string format_report_table(const SweepReport& report) {
    std::string out =
        "# CMI: plug-in estimate with median-binarized measure and gap, conditioned on group (simplified scoring)\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-11s %-19s %-10s\n", "Number of batches", "Batch size", "R percentile range",
                  "CMI (bits)");
    out += buf;
    for (const auto& row : report.rows) {
        const std::string score = row.score ? [&] {
            char s[32];
            std::snprintf(s, sizeof s, "%.4f", row.score->bits);
            return std::string(s);
        }()
                                            : std::string("n/a");
        std::snprintf(buf, sizeof buf, "%-18zu %-11zu %-19s %-10s\n", row.config.num_batches, row.config.batch_size,
                      percentile_range_label(row.config.percentile_lo, row.config.percentile_hi).c_str(),
                      score.c_str());
        out += buf;
    }
    return out;
}

}  // namespace fracdim

#endif
