// parc — prompt-variation generation, scoring and reporting for
// multiple-choice VQA datasets.
//
// Subcommands: ingest validate, vary, simulate, eval, report, query.

#include <glob.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "parc/image_io.hpp"
#include "parc/ingest.hpp"
#include "parc/lang_vary.hpp"
#include "parc/report.hpp"
#include "parc/rng.hpp"
#include "parc/simulate.hpp"
#include "parc/vis_vary.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<parc::VariationTag> parse_variation_list(const std::string& csv) {
    std::vector<parc::VariationTag> tags;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t comma = csv.find(',', start);
        std::string token = csv.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) {
            auto tag = parc::variation_from_string(token);
            if (!tag) throw parc::Error("unknown variation tag '" + token + "'");
            if (*tag == parc::VariationTag::O)
                throw parc::Error("O is the original, not a generatable variation");
            tags.push_back(*tag);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (tags.empty()) throw parc::Error("--variations lists no tags");
    return tags;
}

std::vector<std::string> expand_glob(const std::string& pattern) {
    if (pattern.find_first_of("*?[") == std::string::npos) return {pattern};
    glob_t results;
    std::vector<std::string> paths;
    if (::glob(pattern.c_str(), 0, nullptr, &results) == 0) {
        for (std::size_t i = 0; i < results.gl_pathc; ++i) paths.emplace_back(results.gl_pathv[i]);
    }
    ::globfree(&results);
    if (paths.empty()) throw parc::Error("no files match '" + pattern + "'");
    return paths;
}

fs::path resolve_relative(const fs::path& base_file, const std::string& path) {
    fs::path p(path);
    return p.is_absolute() ? p : base_file.parent_path() / p;
}

// Deterministic output name for a transformed image.
std::string varied_image_name(const std::string& source_path, parc::VariationTag tag) {
    fs::path p(source_path);
    char hash_hex[16];
    std::snprintf(hash_hex, sizeof(hash_hex), "%08llx",
                  static_cast<unsigned long long>(parc::fnv1a(source_path) & 0xffffffffull));
    return p.stem().string() + "-" + hash_hex + "." + std::string(parc::to_string(tag)) + ".png";
}

struct VaryOptions {
    std::string dataset_path;
    std::string variations_csv;
    std::string rewriter = "fallback";
    std::string out_dir;
    std::string annotations_path;
    double blur_sigma = 2.0;
    double brighten_factor = 1.5;
    bool compose = false;
    int jobs = 4;
    std::uint64_t seed = 0;
};

void compose_prompts(std::vector<parc::Prompt>& prompts, const fs::path& dataset_file,
                     const fs::path& out_dir) {
    fs::create_directories(out_dir / "images");
    for (parc::Prompt& p : prompts) {
        if (p.images.size() != 2) continue;
        const parc::ImageSlot* left = nullptr;
        const parc::ImageSlot* right = nullptr;
        for (const parc::ImageSlot& slot : p.images) {
            if (slot.role == parc::ImageRole::left) left = &slot;
            if (slot.role == parc::ImageRole::right) right = &slot;
        }
        if (left == nullptr || right == nullptr) continue;
        parc::ImageBuffer composed = parc::compose_side_by_side(
            parc::read_image(resolve_relative(dataset_file, left->path)),
            parc::read_image(resolve_relative(dataset_file, right->path)));
        std::string name = p.id + ".composed.png";
        for (char& c : name) {
            if (c == '/' || c == ':') c = '_';
        }
        parc::write_png(composed, out_dir / "images" / name);
        parc::ImageSlot slot;
        slot.role = parc::ImageRole::single;
        slot.path = "images/" + name;
        slot.width = composed.width;
        slot.height = composed.height;
        p.images = {slot};
    }
}

int run_vary(const VaryOptions& opt) {
    const fs::path dataset_file(opt.dataset_path);
    parc::DatasetHandle dataset = parc::load_dataset(dataset_file);
    std::vector<parc::VariationTag> tags = parse_variation_list(opt.variations_csv);
    const fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir);

    std::vector<parc::Prompt> originals;
    for (const parc::Prompt& p : dataset.prompts) {
        if (p.variation == parc::VariationTag::O) originals.push_back(p);
    }
    if (originals.empty()) throw parc::Error("dataset has no Original prompts to vary");

    std::unique_ptr<parc::TextRewriter> rewriter;
    bool needs_language = false;
    for (parc::VariationTag tag : tags) needs_language |= parc::is_language_tag(tag);
    if (needs_language) {
        if (opt.rewriter == "fallback") {
            rewriter = parc::make_rule_rewriter();
        } else {
            parc::RewriterEndpoint endpoint;
            endpoint.url = opt.rewriter;
            rewriter = parc::make_http_rewriter(std::move(endpoint));
        }
    }

    // Pixel transforms are cached per (source image, tag); shared source
    // images are transformed and written once.
    std::map<std::pair<std::string, parc::VariationTag>, parc::ImageSlot> image_cache;
    auto transform_image = [&](const parc::ImageSlot& slot,
                               parc::VariationTag tag) -> parc::ImageSlot {
        auto key = std::make_pair(slot.path, tag);
        auto it = image_cache.find(key);
        if (it != image_cache.end()) {
            parc::ImageSlot out = it->second;
            out.role = slot.role;
            return out;
        }
        parc::ImageBuffer img = parc::read_image(resolve_relative(dataset_file, slot.path));
        parc::ImageBuffer varied;
        switch (tag) {
            case parc::VariationTag::VR_B: varied = parc::blur(img, opt.blur_sigma); break;
            case parc::VariationTag::VR_L: varied = parc::brighten(img, opt.brighten_factor); break;
            case parc::VariationTag::VR_R: varied = parc::rotate90(img); break;
            default: throw parc::Error("not a pixel transform");
        }
        fs::create_directories(out_dir / "images");
        std::string name = varied_image_name(slot.path, tag);
        parc::write_png(varied, out_dir / "images" / name);
        parc::ImageSlot out = slot;
        out.path = "images/" + name;
        out.width = varied.width;
        out.height = varied.height;
        image_cache.emplace(key, out);
        return out;
    };

    for (parc::VariationTag tag : tags) {
        std::vector<parc::Prompt> varied;
        std::size_t skipped = 0;
        std::size_t failed = 0;

        if (parc::is_language_tag(tag)) {
            std::vector<parc::VariationResult> results =
                parc::apply_language_variation_batch(originals, tag, *rewriter, opt.jobs);
            for (std::size_t i = 0; i < results.size(); ++i) {
                switch (results[i].status) {
                    case parc::VariationResult::Status::ok:
                        varied.push_back(std::move(*results[i].prompt));
                        break;
                    case parc::VariationResult::Status::not_applicable:
                        ++skipped;
                        break;
                    case parc::VariationResult::Status::failed:
                        ++failed;
                        std::cerr << "warning: " << originals[i].id << ": " << results[i].detail
                                  << "\n";
                        break;
                }
            }
        } else if (tag == parc::VariationTag::VS_S) {
            for (const parc::Prompt& p : originals) varied.push_back(parc::swap_images(p));
        } else if (tag == parc::VariationTag::VS_E) {
            if (opt.annotations_path.empty()) throw parc::Error("VS-E needs --annotations");
            parc::DatasetHandle originals_only;
            originals_only.dataset_id = dataset.dataset_id;
            originals_only.style = dataset.style;
            originals_only.prompts = originals;
            parc::DatasetHandle filtered = parc::exchange_filter(
                originals_only, parc::load_annotations(opt.annotations_path));
            skipped = originals.size() - filtered.prompts.size();
            varied = std::move(filtered.prompts);
        } else {
            for (const parc::Prompt& p : originals) {
                parc::Prompt v = p;
                v.id = p.id + "::" + std::string(parc::to_string(tag));
                v.parent_id = p.id;
                v.variation = tag;
                for (parc::ImageSlot& slot : v.images) slot = transform_image(slot, tag);
                varied.push_back(std::move(v));
            }
        }

        if (opt.compose) compose_prompts(varied, dataset_file, out_dir);

        parc::DatasetHandle out;
        out.dataset_id = dataset.dataset_id;
        out.style = dataset.style;
        out.prompts = std::move(varied);
        fs::path out_file =
            out_dir / (dataset.dataset_id + "." + std::string(parc::to_string(tag)) + ".jsonl");
        parc::save_dataset(out, out_file);
        std::cout << parc::to_string(tag) << ": " << out.prompts.size() << " prompts -> "
                  << out_file.string();
        if (skipped > 0) std::cout << " (" << skipped << " not applicable)";
        if (failed > 0) std::cout << " (" << failed << " failed)";
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prompt-variation sensitivity evaluation for multiple-choice VQA"};
    app.require_subcommand(1);

    auto* ingest_cmd = app.add_subcommand("ingest", "dataset and response file utilities");
    ingest_cmd->require_subcommand(1);
    auto* validate_cmd = ingest_cmd->add_subcommand("validate", "validate dataset/response files");
    std::vector<std::string> validate_datasets;
    std::string validate_responses;
    validate_cmd->add_option("--dataset", validate_datasets, "dataset file(s)")->required();
    validate_cmd->add_option("--responses", validate_responses, "response file");

    auto* vary_cmd = app.add_subcommand("vary", "generate prompt variations");
    VaryOptions vary_opt;
    vary_cmd->add_option("--dataset", vary_opt.dataset_path, "dataset file")->required();
    vary_cmd->add_option("--variations", vary_opt.variations_csv,
                         "comma-separated tags, e.g. LR-I,LS-N,VR-B")->required();
    vary_cmd->add_option("--rewriter", vary_opt.rewriter, "'fallback' or a rewriter endpoint URL");
    vary_cmd->add_option("--out", vary_opt.out_dir, "output directory")->required();
    vary_cmd->add_option("--seed", vary_opt.seed,
                         "generation seed (recorded; rewrites run at temperature 0)");
    vary_cmd->add_option("--blur-sigma", vary_opt.blur_sigma, "VR-B Gaussian sigma in px");
    vary_cmd->add_option("--brighten", vary_opt.brighten_factor, "VR-L brightness factor");
    vary_cmd->add_option("--annotations", vary_opt.annotations_path, "VS-E annotation file");
    vary_cmd->add_flag("--compose", vary_opt.compose,
                       "emit one concatenated image per two-image prompt");
    vary_cmd->add_option("--jobs", vary_opt.jobs, "max rewrites in flight");

    auto* sim_cmd = app.add_subcommand("simulate", "synthetic datasets and responders");
    std::string sim_kind = "oracle";
    double sim_p_correct = 0.8;
    double sim_sharpness = 5.0;
    int sim_n = 1000;
    int sim_options = 4;
    int sim_correct = 1;
    std::uint64_t sim_seed = 0;
    std::string sim_out;
    std::string sim_dataset;
    std::string sim_dataset_out;
    std::string sim_model_id;
    sim_cmd->add_option("--kind", sim_kind, "oracle | anti-oracle | uniform | noisy");
    sim_cmd->add_option("--p-correct", sim_p_correct, "noisy: chance of a correct answer");
    sim_cmd->add_option("--sharpness", sim_sharpness, "noisy: score concentration");
    sim_cmd->add_option("--n", sim_n, "synthetic prompt count");
    sim_cmd->add_option("--options", sim_options, "options per prompt");
    sim_cmd->add_option("--correct", sim_correct, "correct letters per prompt");
    sim_cmd->add_option("--seed", sim_seed, "seed");
    sim_cmd->add_option("--out", sim_out, "responses output file")->required();
    sim_cmd->add_option("--dataset", sim_dataset, "respond to this dataset instead");
    sim_cmd->add_option("--dataset-out", sim_dataset_out, "where to write the generated dataset");
    sim_cmd->add_option("--model-id", sim_model_id, "model id in the response log");

    auto* eval_cmd = app.add_subcommand("eval", "aggregate metrics into a report");
    std::string eval_dataset_dir;
    std::vector<std::string> eval_responses;
    std::string eval_out = "report.json";
    std::string eval_scoring = "parsed";
    parc::EvalConfig eval_config;
    bool eval_strict = false;
    eval_cmd->add_option("--dataset-dir", eval_dataset_dir, "directory of dataset .jsonl files")
        ->required();
    eval_cmd->add_option("--responses", eval_responses, "response file(s) or glob")->required();
    eval_cmd->add_option("--alpha", eval_config.alpha, "conformal error level");
    eval_cmd->add_option("--calib-seed", eval_config.calib_seed, "calibration split seed");
    eval_cmd->add_option("--threads", eval_config.threads, "worker threads");
    eval_cmd->add_option("--out", eval_out, "report JSON output path");
    eval_cmd->add_option("--scoring-mode", eval_scoring, "parsed | logit");
    eval_cmd->add_option("--blur-sigma", eval_config.blur_sigma, "provenance: sigma used in vary");
    eval_cmd->add_option("--brighten", eval_config.brighten_factor,
                         "provenance: factor used in vary");
    eval_cmd->add_flag("--strict", eval_strict, "exit 2 when incomplete cells exist");

    auto* report_cmd = app.add_subcommand("report", "render a report");
    std::string report_in;
    std::string report_format = "md";
    std::string report_out;
    report_cmd->add_option("--in", report_in, "report JSON file")->required();
    report_cmd->add_option("--format", report_format, "csv | md | json");
    report_cmd->add_option("--out", report_out, "output file (default stdout)");

    auto* query_cmd = app.add_subcommand("query", "collect live model responses");
    parc::InferenceEndpoint endpoint;
    std::string query_dataset;
    std::string query_out;
    std::string query_auth;
    query_cmd->add_option("--endpoint", endpoint.url, "inference endpoint URL")->required();
    query_cmd->add_option("--dataset", query_dataset, "dataset file")->required();
    query_cmd->add_option("--out", query_out, "responses output file")->required();
    query_cmd->add_option("--model-name", endpoint.model_name, "model name sent in requests");
    query_cmd->add_option("--auth-header", query_auth, "auth header as Name:Value");
    query_cmd->add_option("--max-in-flight", endpoint.max_in_flight, "max concurrent requests");
    query_cmd->add_option("--timeout", endpoint.timeout_seconds, "per-request timeout (s)");
    query_cmd->add_option("--retries", endpoint.retry_count, "retries per prompt");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            std::vector<parc::DatasetHandle> datasets;
            for (const std::string& path : validate_datasets)
                datasets.push_back(parc::load_dataset(path));
            parc::validate_parent_links(datasets);
            if (!validate_responses.empty()) parc::load_responses(validate_responses, datasets);
            std::cout << "ok\n";
            return 0;
        }
        if (vary_cmd->parsed()) return run_vary(vary_opt);
        if (sim_cmd->parsed()) {
            parc::SyntheticModelSpec spec;
            if (sim_kind == "oracle") spec.kind = parc::SyntheticKind::oracle;
            else if (sim_kind == "anti-oracle" || sim_kind == "anti_oracle")
                spec.kind = parc::SyntheticKind::anti_oracle;
            else if (sim_kind == "uniform") spec.kind = parc::SyntheticKind::uniform;
            else if (sim_kind == "noisy") spec.kind = parc::SyntheticKind::noisy;
            else throw parc::Error("unknown synthetic kind '" + sim_kind + "'");
            spec.p_correct = sim_p_correct;
            spec.sharpness = sim_sharpness;
            spec.seed = sim_seed;
            spec.model_id = sim_model_id.empty() ? sim_kind : sim_model_id;

            parc::DatasetHandle dataset;
            if (!sim_dataset.empty()) {
                dataset = parc::load_dataset(sim_dataset);
            } else {
                dataset = parc::make_synthetic_dataset(sim_n, sim_options, sim_correct, sim_seed);
                fs::path dataset_out = sim_dataset_out.empty()
                                           ? fs::path(sim_out + ".dataset.jsonl")
                                           : fs::path(sim_dataset_out);
                parc::save_dataset(dataset, dataset_out);
                std::cout << "dataset: " << dataset_out.string() << "\n";
            }
            parc::save_responses(parc::respond_all(spec, dataset), sim_out);
            std::cout << "responses: " << sim_out << "\n";
            return 0;
        }
        if (eval_cmd->parsed()) {
            std::vector<parc::DatasetHandle> datasets;
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(eval_dataset_dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
                    files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            if (files.empty()) throw parc::Error("no .jsonl files in " + eval_dataset_dir);
            for (const fs::path& f : files) datasets.push_back(parc::load_dataset(f));

            parc::ScoringMode mode;
            if (eval_scoring == "parsed" || eval_scoring == "parsed_text")
                mode = parc::ScoringMode::parsed_text;
            else if (eval_scoring == "logit" || eval_scoring == "logit_argmax")
                mode = parc::ScoringMode::logit_argmax;
            else throw parc::Error("unknown scoring mode '" + eval_scoring + "'");

            std::vector<parc::ResponseLog> logs;
            std::set<std::string> response_files;
            for (const std::string& pattern : eval_responses)
                for (const std::string& path : expand_glob(pattern)) response_files.insert(path);
            for (const std::string& path : response_files)
                logs.push_back(parc::load_responses(path, datasets, mode));

            parc::Report report = parc::aggregate(logs, datasets, eval_config);
            parc::save_report(report, eval_out);
            std::size_t incomplete = 0;
            for (const parc::ReportCell& cell : report.cells)
                if (cell.status == parc::CellStatus::incomplete) ++incomplete;
            std::cout << "report: " << eval_out << " (" << report.cells.size() << " cells, "
                      << incomplete << " incomplete)\n";
            if (eval_strict && incomplete > 0) return 2;
            return 0;
        }
        if (report_cmd->parsed()) {
            auto format = parc::report_format_from_string(report_format);
            if (!format) throw parc::Error("unknown format '" + report_format + "'");
            parc::Report report = parc::load_report(report_in);
            if (report_out.empty()) {
                parc::emit(report, *format, std::cout);
            } else {
                std::ofstream out(report_out, std::ios::binary);
                if (!out) throw parc::Error("cannot write " + report_out);
                parc::emit(report, *format, out);
            }
            return 0;
        }
        if (query_cmd->parsed()) {
            if (!query_auth.empty()) {
                std::size_t colon = query_auth.find(':');
                if (colon == std::string::npos) throw parc::Error("--auth-header needs Name:Value");
                endpoint.auth_header_name = query_auth.substr(0, colon);
                endpoint.auth_header_value = query_auth.substr(colon + 1);
            }
            parc::DatasetHandle dataset = parc::load_dataset(query_dataset);
            parc::ResponseLog log = parc::query_model(endpoint, dataset.prompts);
            parc::save_responses(log, query_out);
            std::cout << "responses: " << query_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
