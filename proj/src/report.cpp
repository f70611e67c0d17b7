#include "parc/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "parc/rng.hpp"

namespace parc {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest round-trip decimal form, deterministic across runs.
std::string fmt_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw Error("failed to format double");
    return std::string(buf, ptr);
}

std::string fmt2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return std::string(buf);
}

// One logical dataset: every file sharing a dataset_id, varied prompts
// included, with prompts ordered by id.
struct MergedDataset {
    std::string dataset_id;
    std::vector<const Prompt*> prompts;
    std::unordered_map<std::string, const Prompt*> by_id;
    bool comparative_originals = false;
};

std::vector<MergedDataset> merge_datasets(std::span<const DatasetHandle> datasets) {
    std::map<std::string, MergedDataset> merged;
    for (const DatasetHandle& d : datasets) {
        MergedDataset& md = merged[d.dataset_id];
        md.dataset_id = d.dataset_id;
        for (const Prompt& p : d.prompts) {
            if (!md.by_id.emplace(p.id, &p).second)
                throw Error("duplicate prompt id '" + p.id + "' across files of dataset '" +
                            d.dataset_id + "'");
            md.prompts.push_back(&p);
        }
    }
    std::vector<MergedDataset> out;
    for (auto& [unused, md] : merged) {
        std::sort(md.prompts.begin(), md.prompts.end(),
                  [](const Prompt* a, const Prompt* b) { return a->id < b->id; });
        for (const Prompt* p : md.prompts) {
            if (p->variation != VariationTag::O) continue;
            md.comparative_originals = p->images.size() == 2 && p->options.size() == 2 &&
                                       p->options.texts()[0] == "Left" &&
                                       p->options.texts()[1] == "Right";
            break;
        }
        out.push_back(std::move(md));
    }
    return out;
}

double mean_over_prompts(const std::vector<std::pair<const Prompt*, const ResponseRecord*>>& items,
                         const std::function<double(const Prompt&, const ResponseRecord&)>& f) {
    double total = 0.0;
    for (const auto& [prompt, record] : items) total += f(*prompt, *record);
    return total / static_cast<double>(items.size());
}

ReportCell compute_cell(const ResponseLog& log,
                        const std::unordered_map<std::string, const ResponseRecord*>& record_index,
                        const MergedDataset& md, VariationTag tag, const EvalConfig& config) {
    ReportCell cell;
    cell.model_id = log.model_id;
    cell.dataset_id = md.dataset_id;
    cell.variation = tag;
    cell.provenance.alpha = config.alpha;
    cell.provenance.calib_seed = config.calib_seed;
    cell.provenance.blur_sigma = config.blur_sigma;
    cell.provenance.brighten_factor = config.brighten_factor;

    std::vector<const Prompt*> cell_prompts;
    for (const Prompt* p : md.prompts) {
        if (p->variation == tag) cell_prompts.push_back(p);
    }
    if (cell_prompts.empty()) {
        cell.status = CellStatus::not_applicable;
        bool structural = !md.comparative_originals &&
                          (tag == VariationTag::LS_M || tag == VariationTag::VS_S ||
                           tag == VariationTag::VS_E);
        cell.note = structural ? "dataset style does not support this variation"
                               : "no prompts with this variation";
        return cell;
    }

    std::vector<std::pair<const Prompt*, const ResponseRecord*>> responded;
    for (const Prompt* p : cell_prompts) {
        auto it = record_index.find(p->id);
        if (it != record_index.end()) responded.emplace_back(p, it->second);
    }
    if (responded.empty()) {
        cell.status = CellStatus::incomplete;
        cell.note = "no responses for this cell";
        return cell;
    }
    if (responded.size() < cell_prompts.size()) {
        cell.status = CellStatus::incomplete;
        cell.note = std::to_string(cell_prompts.size() - responded.size()) + " of " +
                    std::to_string(cell_prompts.size()) + " prompts lack responses";
    }

    MetricBundle& bundle = cell.bundle;
    bundle.n = static_cast<int>(responded.size());

    // Accuracy over all responded prompts.
    bundle.acc = mean_over_prompts(responded, [&](const Prompt& p, const ResponseRecord& r) {
        return static_cast<double>(
            accuracy(effective_choice(r, p.options, log.scoring_mode), p.answer_key));
    });

    std::vector<const Prompt*> responded_prompts;
    for (const auto& [p, unused] : responded) responded_prompts.push_back(p);
    bundle.baseline.acc_rand = random_accuracy(responded_prompts);

    // Certainty: conformal prediction on the scored prompts, LAC threshold
    // fitted on the calibration half, set sizes scored on the other half.
    std::vector<std::pair<const Prompt*, const ResponseRecord*>> scored;
    for (const auto& item : responded) {
        if (item.second->option_scores &&
            item.first->answer_key.correct.size() < item.first->options.size())
            scored.push_back(item);
    }
    if (scored.size() >= 2) {
        std::vector<std::size_t> calib_idx;
        std::vector<std::size_t> eval_idx;
        split_calibration(
            scored.size(),
            cell_split_seed(config.calib_seed, md.dataset_id, log.model_id, tag),
            calib_idx, eval_idx);
        if (!calib_idx.empty() && !eval_idx.empty()) {
            std::vector<MergedScores> calibration;
            calibration.reserve(calib_idx.size());
            for (std::size_t i : calib_idx) {
                calibration.push_back(merge_correct(*scored[i].second->option_scores,
                                                    scored[i].first->answer_key.correct));
            }
            CalibrationModel model = fit_lac(calibration, config.alpha);
            double total = 0.0;
            for (std::size_t i : eval_idx) {
                MergedScores merged = merge_correct(*scored[i].second->option_scores,
                                                    scored[i].first->answer_key.correct);
                PredictionSet set = predict_set(model, merged);
                total += certainty(set.size(), set.effective_option_count);
            }
            bundle.cert = total / static_cast<double>(eval_idx.size());
            cell.provenance.calib_count = static_cast<int>(calib_idx.size());
            cell.provenance.eval_count = static_cast<int>(eval_idx.size());
        }
    }

    // Consistency against the Original parent (varied cells only).
    if (tag != VariationTag::O) {
        VariationKind kind = variation_kind(tag);
        ConsistencyKind cons_kind = (kind == VariationKind::language_semantic ||
                                     kind == VariationKind::vision_semantic)
                                        ? ConsistencyKind::semantic
                                        : ConsistencyKind::reformulation;
        std::vector<std::pair<const Prompt*, const Prompt*>> pairs;
        double cons_total = 0.0;
        std::size_t missing_original = 0;
        for (const auto& [p, rec] : responded) {
            auto parent_it = md.by_id.find(p->parent_id);
            if (parent_it == md.by_id.end()) {
                ++missing_original;
                continue;
            }
            auto parent_rec_it = record_index.find(parent_it->second->id);
            if (parent_rec_it == record_index.end()) {
                ++missing_original;
                continue;
            }
            const Prompt& parent = *parent_it->second;
            ModelChoice varied_choice = effective_choice(*rec, p->options, log.scoring_mode);
            ModelChoice original_choice =
                effective_choice(*parent_rec_it->second, parent.options, log.scoring_mode);
            cons_total += consistency(varied_choice, original_choice, cons_kind);
            pairs.emplace_back(p, &parent);
        }
        if (missing_original > 0) {
            cell.status = CellStatus::incomplete;
            cell.note = std::to_string(missing_original) +
                        " prompts lack an Original response for the consistency pairing";
        }
        if (!pairs.empty()) {
            double cons = cons_total / static_cast<double>(pairs.size());
            bundle.baseline.cons_rand_reph =
                random_consistency(pairs, ConsistencyKind::reformulation);
            bundle.baseline.cons_rand_sem = random_consistency(pairs, ConsistencyKind::semantic);
            double cons_rand;
            if (cons_kind == ConsistencyKind::reformulation) {
                bundle.cons_reph = cons;
                cons_rand = *bundle.baseline.cons_rand_reph;
            } else {
                bundle.cons_sem = cons;
                cons_rand = *bundle.baseline.cons_rand_sem;
            }
            if (cons_rand > 0.0 && cons_rand < 1.0) bundle.cons_calib = calibrate(cons, cons_rand);
        } else if (cell.status == CellStatus::ok) {
            cell.status = CellStatus::incomplete;
            cell.note = "no consistency pairs available";
        }
    }

    // Calibration and reliability.
    double acc_rand = bundle.baseline.acc_rand;
    bool baseline_usable = acc_rand > 0.0 && acc_rand < 1.0;
    if (baseline_usable) bundle.acc_calib = calibrate(*bundle.acc, acc_rand);
    if (bundle.cert) {
        bundle.cert_calib = bundle.cert;  // conformal certainty is already on the random-0 scale
        bundle.rel = reliability(*bundle.acc, *bundle.cert, 0.5);
        if (baseline_usable) bundle.rel_calib = reliability(*bundle.acc, *bundle.cert, acc_rand);
    }
    if (bundle.rel_calib && bundle.acc_calib && bundle.cert)
        cell.guarantees = check_guarantees(*bundle.rel_calib, *bundle.acc_calib, *bundle.cert);
    return cell;
}

struct AverageAccumulator {
    double rel = 0.0, acc = 0.0, cert = 0.0, cons = 0.0;
    int n_rel = 0, n_acc = 0, n_cert = 0, n_cons = 0;
    int cells = 0;

    void add(const MetricBundle& b) {
        ++cells;
        if (b.rel_calib) { rel += *b.rel_calib; ++n_rel; }
        if (b.acc_calib) { acc += *b.acc_calib; ++n_acc; }
        if (b.cert_calib) { cert += *b.cert_calib; ++n_cert; }
        if (b.cons_calib) { cons += *b.cons_calib; ++n_cons; }
    }

    AverageRow finish(std::string model, AverageRow::Scope scope, std::string key) const {
        AverageRow row;
        row.model_id = std::move(model);
        row.scope = scope;
        row.key = std::move(key);
        row.cell_count = cells;
        if (n_rel > 0) row.rel_calib = rel / n_rel;
        if (n_acc > 0) row.acc_calib = acc / n_acc;
        if (n_cert > 0) row.cert_calib = cert / n_cert;
        if (n_cons > 0) row.cons_calib = cons / n_cons;
        return row;
    }
};

}  // namespace

std::string_view to_string(CellStatus status) {
    switch (status) {
        case CellStatus::ok: return "ok";
        case CellStatus::incomplete: return "incomplete";
        case CellStatus::not_applicable: return "n.a.";
    }
    throw Error("invalid cell status");
}

std::uint64_t cell_split_seed(std::uint64_t calib_seed, std::string_view dataset_id,
                              std::string_view model_id, VariationTag tag) {
    std::uint64_t h = mix_seed(kFnvBasis, calib_seed);
    h = fnv1a(dataset_id, h);
    h = fnv1a(model_id, h);
    h = fnv1a(to_string(tag), h);
    return h;
}

void split_calibration(std::size_t count, std::uint64_t seed,
                       std::vector<std::size_t>& calibration,
                       std::vector<std::size_t>& evaluation) {
    std::vector<std::size_t> perm = seeded_permutation(count, seed);
    std::size_t half = count / 2;
    calibration.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
    evaluation.assign(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
    std::sort(calibration.begin(), calibration.end());
    std::sort(evaluation.begin(), evaluation.end());
}

Report aggregate(std::span<const ResponseLog> logs, std::span<const DatasetHandle> datasets,
                 const EvalConfig& config) {
    if (config.threads < 1) throw Error("aggregate: threads must be >= 1");
    std::vector<MergedDataset> merged = merge_datasets(datasets);

    // Logs sharing a model_id (e.g. one response file per varied dataset)
    // merge into one logical log; duplicate (prompt_id, model_id) pairs are
    // invalid.
    std::map<std::string, ResponseLog> merged_logs;
    for (const ResponseLog& log : logs) {
        auto [it, inserted] = merged_logs.try_emplace(log.model_id, ResponseLog{});
        if (inserted) {
            it->second.model_id = log.model_id;
            it->second.scoring_mode = log.scoring_mode;
        }
        it->second.records.insert(it->second.records.end(), log.records.begin(),
                                  log.records.end());
    }
    std::vector<const ResponseLog*> sorted_logs;
    for (const auto& [unused, log] : merged_logs) sorted_logs.push_back(&log);

    std::vector<std::unordered_map<std::string, const ResponseRecord*>> record_indices;
    record_indices.reserve(sorted_logs.size());
    for (const ResponseLog* log : sorted_logs) {
        std::unordered_map<std::string, const ResponseRecord*> index;
        for (const ResponseRecord& rec : log->records) {
            if (!index.emplace(rec.prompt_id, &rec).second)
                throw Error("duplicate (prompt_id, model_id): " + rec.prompt_id + ", " +
                            log->model_id);
        }
        record_indices.push_back(std::move(index));
    }

    struct Task {
        std::size_t log_index;
        std::size_t dataset_index;
        VariationTag tag;
    };
    std::vector<Task> tasks;
    for (std::size_t li = 0; li < sorted_logs.size(); ++li) {
        for (std::size_t di = 0; di < merged.size(); ++di) {
            for (VariationTag tag : kAllVariationTags) tasks.push_back({li, di, tag});
        }
    }

    Report report;
    report.cells.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            report.cells[i] = compute_cell(*sorted_logs[task.log_index],
                                           record_indices[task.log_index],
                                           merged[task.dataset_index], task.tag, config);
        }
    };
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.threads),
                                                  std::max<std::size_t>(tasks.size(), 1));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // Paper-style AVG rows over ok-cells, equal weight per cell.
    std::map<std::pair<std::string, std::string>, AverageAccumulator> by_variation;
    std::map<std::pair<std::string, std::string>, AverageAccumulator> by_dataset;
    for (const ReportCell& cell : report.cells) {
        if (cell.status != CellStatus::ok) continue;
        by_variation[{cell.model_id, std::string(to_string(cell.variation))}].add(cell.bundle);
        by_dataset[{cell.model_id, cell.dataset_id}].add(cell.bundle);
    }
    for (const ResponseLog* log : sorted_logs) {
        for (VariationTag tag : kAllVariationTags) {
            auto it = by_variation.find({log->model_id, std::string(to_string(tag))});
            if (it == by_variation.end()) continue;
            report.averages.push_back(it->second.finish(
                log->model_id, AverageRow::Scope::across_datasets, std::string(to_string(tag))));
        }
        for (const MergedDataset& md : merged) {
            auto it = by_dataset.find({log->model_id, md.dataset_id});
            if (it == by_dataset.end()) continue;
            report.averages.push_back(it->second.finish(
                log->model_id, AverageRow::Scope::across_variations, md.dataset_id));
        }
    }
    return report;
}

namespace {

void put_optional(ordered_json& j, const char* key, const std::optional<double>& value) {
    if (value) j[key] = *value;
}

ordered_json cell_to_json(const ReportCell& cell) {
    ordered_json j;
    j["model_id"] = cell.model_id;
    j["dataset_id"] = cell.dataset_id;
    j["variation"] = std::string(to_string(cell.variation));
    j["status"] = std::string(to_string(cell.status));
    if (!cell.note.empty()) j["note"] = cell.note;
    j["n"] = cell.bundle.n;
    ordered_json metrics;
    put_optional(metrics, "acc", cell.bundle.acc);
    put_optional(metrics, "acc_calib", cell.bundle.acc_calib);
    put_optional(metrics, "cert", cell.bundle.cert);
    put_optional(metrics, "cert_calib", cell.bundle.cert_calib);
    put_optional(metrics, "cons_reph", cell.bundle.cons_reph);
    put_optional(metrics, "cons_sem", cell.bundle.cons_sem);
    put_optional(metrics, "cons_calib", cell.bundle.cons_calib);
    put_optional(metrics, "rel", cell.bundle.rel);
    put_optional(metrics, "rel_calib", cell.bundle.rel_calib);
    j["metrics"] = std::move(metrics);
    ordered_json baseline;
    baseline["acc_rand"] = cell.bundle.baseline.acc_rand;
    put_optional(baseline, "cons_rand_reph", cell.bundle.baseline.cons_rand_reph);
    put_optional(baseline, "cons_rand_sem", cell.bundle.baseline.cons_rand_sem);
    j["baseline"] = std::move(baseline);
    if (cell.guarantees) {
        ordered_json g;
        g["cert_bound_holds"] = cell.guarantees->cert_bound_holds;
        g["acc_bound_holds"] = cell.guarantees->acc_bound_holds;
        j["guarantees"] = std::move(g);
    }
    ordered_json prov;
    prov["alpha"] = cell.provenance.alpha;
    prov["calib_seed"] = cell.provenance.calib_seed;
    prov["blur_sigma"] = cell.provenance.blur_sigma;
    prov["brighten_factor"] = cell.provenance.brighten_factor;
    prov["calib_count"] = cell.provenance.calib_count;
    prov["eval_count"] = cell.provenance.eval_count;
    j["provenance"] = std::move(prov);
    return j;
}

ReportCell cell_from_json(const ordered_json& j) {
    ReportCell cell;
    cell.model_id = j.at("model_id").get<std::string>();
    cell.dataset_id = j.at("dataset_id").get<std::string>();
    auto tag = variation_from_string(j.at("variation").get<std::string>());
    if (!tag) throw Error("report cell has unknown variation tag");
    cell.variation = *tag;
    std::string status = j.at("status").get<std::string>();
    if (status == "ok") cell.status = CellStatus::ok;
    else if (status == "incomplete") cell.status = CellStatus::incomplete;
    else if (status == "n.a.") cell.status = CellStatus::not_applicable;
    else throw Error("report cell has unknown status '" + status + "'");
    if (j.contains("note")) cell.note = j.at("note").get<std::string>();
    cell.bundle.n = j.at("n").get<int>();
    const ordered_json& metrics = j.at("metrics");
    auto get_optional = [](const ordered_json& obj, const char* key) -> std::optional<double> {
        if (!obj.contains(key)) return std::nullopt;
        return obj.at(key).get<double>();
    };
    cell.bundle.acc = get_optional(metrics, "acc");
    cell.bundle.acc_calib = get_optional(metrics, "acc_calib");
    cell.bundle.cert = get_optional(metrics, "cert");
    cell.bundle.cert_calib = get_optional(metrics, "cert_calib");
    cell.bundle.cons_reph = get_optional(metrics, "cons_reph");
    cell.bundle.cons_sem = get_optional(metrics, "cons_sem");
    cell.bundle.cons_calib = get_optional(metrics, "cons_calib");
    cell.bundle.rel = get_optional(metrics, "rel");
    cell.bundle.rel_calib = get_optional(metrics, "rel_calib");
    const ordered_json& baseline = j.at("baseline");
    cell.bundle.baseline.acc_rand = baseline.at("acc_rand").get<double>();
    cell.bundle.baseline.cons_rand_reph = get_optional(baseline, "cons_rand_reph");
    cell.bundle.baseline.cons_rand_sem = get_optional(baseline, "cons_rand_sem");
    if (j.contains("guarantees")) {
        GuaranteeReport g;
        g.cert_bound_holds = j.at("guarantees").at("cert_bound_holds").get<bool>();
        g.acc_bound_holds = j.at("guarantees").at("acc_bound_holds").get<bool>();
        cell.guarantees = g;
    }
    const ordered_json& prov = j.at("provenance");
    cell.provenance.alpha = prov.at("alpha").get<double>();
    cell.provenance.calib_seed = prov.at("calib_seed").get<std::uint64_t>();
    cell.provenance.blur_sigma = prov.at("blur_sigma").get<double>();
    cell.provenance.brighten_factor = prov.at("brighten_factor").get<double>();
    cell.provenance.calib_count = prov.at("calib_count").get<int>();
    cell.provenance.eval_count = prov.at("eval_count").get<int>();
    return cell;
}

ordered_json report_to_json(const Report& report) {
    ordered_json j;
    ordered_json cells = ordered_json::array();
    for (const ReportCell& cell : report.cells) cells.push_back(cell_to_json(cell));
    j["cells"] = std::move(cells);
    ordered_json averages = ordered_json::array();
    for (const AverageRow& row : report.averages) {
        ordered_json r;
        r["model_id"] = row.model_id;
        r["scope"] = row.scope == AverageRow::Scope::across_datasets ? "across_datasets"
                                                                     : "across_variations";
        r["key"] = row.key;
        put_optional(r, "rel_calib", row.rel_calib);
        put_optional(r, "acc_calib", row.acc_calib);
        put_optional(r, "cert_calib", row.cert_calib);
        put_optional(r, "cons_calib", row.cons_calib);
        r["cell_count"] = row.cell_count;
        averages.push_back(std::move(r));
    }
    j["averages"] = std::move(averages);
    return j;
}

std::string csv_field(const std::optional<double>& value) {
    return value ? fmt_double(*value) : std::string();
}

void emit_csv(const Report& report, std::ostream& out) {
    out << "model_id,dataset_id,variation,status,n,acc,acc_calib,cert,cert_calib,cons_reph,"
           "cons_sem,cons_calib,rel,rel_calib,acc_rand,cons_rand_reph,cons_rand_sem,"
           "cert_bound_holds,acc_bound_holds,alpha,calib_seed,blur_sigma,brighten_factor,"
           "calib_count,eval_count,note\n";
    for (const ReportCell& cell : report.cells) {
        const MetricBundle& b = cell.bundle;
        out << cell.model_id << ',' << cell.dataset_id << ',' << to_string(cell.variation) << ','
            << to_string(cell.status) << ',' << b.n << ',' << csv_field(b.acc) << ','
            << csv_field(b.acc_calib) << ',' << csv_field(b.cert) << ','
            << csv_field(b.cert_calib) << ',' << csv_field(b.cons_reph) << ','
            << csv_field(b.cons_sem) << ',' << csv_field(b.cons_calib) << ','
            << csv_field(b.rel) << ',' << csv_field(b.rel_calib) << ','
            << (cell.status == CellStatus::not_applicable ? std::string()
                                                          : fmt_double(b.baseline.acc_rand))
            << ',' << csv_field(b.baseline.cons_rand_reph) << ','
            << csv_field(b.baseline.cons_rand_sem) << ','
            << (cell.guarantees ? (cell.guarantees->cert_bound_holds ? "1" : "0") : "") << ','
            << (cell.guarantees ? (cell.guarantees->acc_bound_holds ? "1" : "0") : "") << ','
            << fmt_double(cell.provenance.alpha) << ',' << cell.provenance.calib_seed << ','
            << fmt_double(cell.provenance.blur_sigma) << ','
            << fmt_double(cell.provenance.brighten_factor) << ',' << cell.provenance.calib_count
            << ',' << cell.provenance.eval_count << ",\"" << cell.note << "\"\n";
    }
    for (const AverageRow& row : report.averages) {
        bool across_datasets = row.scope == AverageRow::Scope::across_datasets;
        out << row.model_id << ',' << (across_datasets ? "AVG" : row.key) << ','
            << (across_datasets ? row.key : "AVG") << ",avg," << row.cell_count << ','
            << "," << csv_field(row.acc_calib) << ",," << csv_field(row.cert_calib) << ",,,"
            << csv_field(row.cons_calib) << ",," << csv_field(row.rel_calib)
            << ",,,,,,,,,,,,\n";
    }
}

void emit_markdown(const Report& report, std::ostream& out) {
    // Ordered model and dataset lists.
    std::vector<std::string> models;
    std::vector<std::string> dataset_ids;
    for (const ReportCell& cell : report.cells) {
        if (std::find(models.begin(), models.end(), cell.model_id) == models.end())
            models.push_back(cell.model_id);
        if (std::find(dataset_ids.begin(), dataset_ids.end(), cell.dataset_id) ==
            dataset_ids.end())
            dataset_ids.push_back(cell.dataset_id);
    }
    std::sort(models.begin(), models.end());
    std::sort(dataset_ids.begin(), dataset_ids.end());

    auto find_cell = [&](const std::string& model, const std::string& dataset,
                         VariationTag tag) -> const ReportCell* {
        for (const ReportCell& cell : report.cells) {
            if (cell.model_id == model && cell.dataset_id == dataset && cell.variation == tag)
                return &cell;
        }
        return nullptr;
    };
    auto find_avg = [&](const std::string& model, VariationTag tag) -> const AverageRow* {
        for (const AverageRow& row : report.averages) {
            if (row.scope == AverageRow::Scope::across_datasets && row.model_id == model &&
                row.key == to_string(tag))
                return &row;
        }
        return nullptr;
    };
    auto show = [](const ReportCell* cell, const std::optional<double>& value) -> std::string {
        if (cell == nullptr) return "";
        if (cell->status == CellStatus::not_applicable) return "n.a.";
        if (!value) return cell->status == CellStatus::incomplete ? "inc." : "";
        return fmt2(*value);
    };

    out << "# Evaluation report\n";
    for (const std::string& model : models) {
        out << "\n## Model " << model << "\n\n";
        out << "| Variation |";
        for (const std::string& ds : dataset_ids) out << " Rel C " << ds << " |";
        out << " Rel C AVG | Acc C AVG | Cert C AVG |";
        for (const std::string& ds : dataset_ids) out << " Cons C " << ds << " |";
        out << " Cons C AVG |\n";
        out << "|---|";
        for (std::size_t i = 0; i < dataset_ids.size() * 2 + 4; ++i) out << "---|";
        out << "\n";
        for (VariationTag tag : kAllVariationTags) {
            out << "| " << to_string(tag) << " |";
            for (const std::string& ds : dataset_ids) {
                const ReportCell* cell = find_cell(model, ds, tag);
                out << ' ' << show(cell, cell ? cell->bundle.rel_calib : std::nullopt) << " |";
            }
            const AverageRow* avg = find_avg(model, tag);
            out << ' ' << (avg && avg->rel_calib ? fmt2(*avg->rel_calib) : "") << " |";
            out << ' ' << (avg && avg->acc_calib ? fmt2(*avg->acc_calib) : "") << " |";
            out << ' ' << (avg && avg->cert_calib ? fmt2(*avg->cert_calib) : "") << " |";
            for (const std::string& ds : dataset_ids) {
                const ReportCell* cell = find_cell(model, ds, tag);
                out << ' ' << show(cell, cell ? cell->bundle.cons_calib : std::nullopt) << " |";
            }
            out << ' ' << (avg && avg->cons_calib ? fmt2(*avg->cons_calib) : "") << " |\n";
        }
    }
}

}  // namespace

std::optional<ReportFormat> report_format_from_string(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "md" || text == "markdown") return ReportFormat::markdown;
    if (text == "json") return ReportFormat::json;
    return std::nullopt;
}

void emit(const Report& report, ReportFormat format, std::ostream& out) {
    switch (format) {
        case ReportFormat::csv:
            emit_csv(report, out);
            break;
        case ReportFormat::markdown:
            emit_markdown(report, out);
            break;
        case ReportFormat::json:
            out << report_to_json(report).dump(2) << '\n';
            break;
    }
}

void save_report(const Report& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write report file: " + path.string());
    emit(report, ReportFormat::json, out);
}

Report load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open report file: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::exception& e) {
        throw Error("malformed report file " + path.string() + ": " + e.what());
    }
    Report report;
    for (const auto& cj : j.at("cells")) report.cells.push_back(cell_from_json(cj));
    for (const auto& rj : j.at("averages")) {
        AverageRow row;
        row.model_id = rj.at("model_id").get<std::string>();
        std::string scope = rj.at("scope").get<std::string>();
        row.scope = scope == "across_datasets" ? AverageRow::Scope::across_datasets
                                               : AverageRow::Scope::across_variations;
        row.key = rj.at("key").get<std::string>();
        if (rj.contains("rel_calib")) row.rel_calib = rj.at("rel_calib").get<double>();
        if (rj.contains("acc_calib")) row.acc_calib = rj.at("acc_calib").get<double>();
        if (rj.contains("cert_calib")) row.cert_calib = rj.at("cert_calib").get<double>();
        if (rj.contains("cons_calib")) row.cons_calib = rj.at("cons_calib").get<double>();
        row.cell_count = rj.at("cell_count").get<int>();
        report.averages.push_back(std::move(row));
    }
    return report;
}

}  // namespace parc
