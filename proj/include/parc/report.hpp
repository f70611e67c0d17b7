#pragma once
// End-to-end aggregation: per (model, dataset, variation) cell metrics with
// conformal certainty, consistency against the Original parent, calibration
// against the cell's random baselines, paper-style AVG rows, and report
// emission as CSV, markdown or JSON. Also the optional live-inference
// client.
//
// Varied prompts carry the same dataset_id as their parents, so dataset
// files from `parc vary` merge with the original file into one logical
// dataset per dataset_id before aggregation.

#include <filesystem>
#include <iosfwd>
#include <span>

#include "parc/conformal.hpp"
#include "parc/ingest.hpp"
#include "parc/metrics.hpp"

namespace parc {

enum class CellStatus { ok, incomplete, not_applicable };

std::string_view to_string(CellStatus status);

// Everything needed to reproduce a cell: unspecified-by-construction
// parameters always travel with the emitted numbers.
struct Provenance {
    double alpha = 0.1;
    std::uint64_t calib_seed = 0;
    double blur_sigma = 2.0;
    double brighten_factor = 1.5;
    int calib_count = 0;  // conformal split sizes for this cell
    int eval_count = 0;
};

struct ReportCell {
    std::string model_id;
    std::string dataset_id;
    VariationTag variation = VariationTag::O;
    CellStatus status = CellStatus::ok;
    std::string note;  // reason for n.a. / incomplete cells
    MetricBundle bundle;
    std::optional<GuaranteeReport> guarantees;
    Provenance provenance;
};

// Paper-style AVG entries: per (model, variation) across datasets and per
// (model, dataset) across variations, averaging ok-cells with equal weight.
struct AverageRow {
    enum class Scope { across_datasets, across_variations };
    std::string model_id;
    Scope scope = Scope::across_datasets;
    std::string key;  // variation tag or dataset id, depending on scope
    std::optional<double> rel_calib;
    std::optional<double> acc_calib;
    std::optional<double> cert_calib;
    std::optional<double> cons_calib;
    int cell_count = 0;
};

struct Report {
    std::vector<ReportCell> cells;
    std::vector<AverageRow> averages;
};

struct EvalConfig {
    double alpha = 0.1;
    std::uint64_t calib_seed = 0;
    int threads = 1;
    // Recorded in provenance so emitted tables stay reproducible.
    double blur_sigma = 2.0;
    double brighten_factor = 1.5;
};

// The seed driving one cell's calibration/evaluation split.
std::uint64_t cell_split_seed(std::uint64_t calib_seed, std::string_view dataset_id,
                              std::string_view model_id, VariationTag tag);

// Deterministic 50/50 split of `count` items: the first floor(count/2)
// positions of the seeded permutation calibrate, the rest evaluate.
void split_calibration(std::size_t count, std::uint64_t seed,
                       std::vector<std::size_t>& calibration, std::vector<std::size_t>& evaluation);

// Computes every (model, dataset, variation) cell. Cells are emitted for
// all 12 variation tags per (model, dataset): structurally unsupported or
// absent variations are explicit n.a. rows, and cells missing responses or
// consistency partners are marked incomplete. Accuracy and consistency use
// all responded prompts; certainty is fitted on the calibration half and
// reported on the evaluation half. Output order and content are independent
// of the thread count.
Report aggregate(std::span<const ResponseLog> logs, std::span<const DatasetHandle> datasets,
                 const EvalConfig& config);

enum class ReportFormat { csv, markdown, json };

std::optional<ReportFormat> report_format_from_string(std::string_view text);

// Deterministic emission; identical reports yield identical bytes.
void emit(const Report& report, ReportFormat format, std::ostream& out);

void save_report(const Report& report, const std::filesystem::path& path);
Report load_report(const std::filesystem::path& path);

struct InferenceEndpoint {
    std::string url;
    std::string auth_header_name;
    std::string auth_header_value;
    std::string model_name = "model";
    int max_in_flight = 4;
    int timeout_seconds = 30;
    int retry_count = 2;  // exponential backoff between attempts
};

// Queries the endpoint once per prompt with bounded concurrency; results
// come back in prompt order. Per-prompt failures after retries become
// Unparsed records with empty raw_text instead of aborting the batch.
// Option scores are the softmax of returned per-letter logprobs when the
// endpoint provides them, and absent otherwise.
ResponseLog query_model(const InferenceEndpoint& endpoint, std::span<const Prompt> prompts);

}  // namespace parc
