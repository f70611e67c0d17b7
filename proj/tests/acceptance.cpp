// Acceptance suite: runs every release criterion and prints one PASS/FAIL
// line per criterion. Exit status is nonzero when any criterion fails.
//
// Usage: parc_acceptance <path-to-parc-cli>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "parc/conformal.hpp"
#include "parc/image_io.hpp"
#include "parc/ingest.hpp"
#include "parc/lang_vary.hpp"
#include "parc/metrics.hpp"
#include "parc/report.hpp"
#include "parc/rng.hpp"
#include "parc/simulate.hpp"
#include "parc/vis_vary.hpp"

using namespace parc;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report_criterion(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++g_failures;
}

const fs::path kDataDir = PARC_DATA_DIR;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: certainty formula endpoints, tolerance 0.
void criterion_certainty() {
    bool ok = certainty(1, 4) == 1.0 && certainty(4, 4) == 0.0 && certainty(2, 4) == 2.0 / 3.0;
    report_criterion(1, "certainty endpoints (1,4)->1, (4,4)->0, (2,4)->2/3", ok);
}

// Criterion 2: calibration endpoints and monotonicity, tolerance 1e-12.
void criterion_calibration() {
    bool ok = true;
    for (int i = 1; i <= 9; ++i) {
        double r = i / 10.0;
        ok &= std::abs(calibrate(1.0, r) - 1.0) <= 1e-12;
        ok &= std::abs(calibrate(0.0, r) + 1.0) <= 1e-12;
        ok &= std::abs(calibrate(r, r)) <= 1e-12;
    }
    for (double r : {0.2, 0.5, 0.8}) {
        double previous = -2.0;
        for (int i = 0; i <= 1000; ++i) {
            double value = calibrate(i / 1000.0, r);
            ok &= value >= previous - 1e-12;
            previous = value;
        }
    }
    report_criterion(2, "calibration endpoints and monotonicity", ok);
}

// Criterion 3: reliability zero-level and the exponent identity.
void criterion_reliability_zero() {
    bool ok = exponent_m(0.5) == 1.0;
    for (double r : {0.27, 1.0 / 3.0, 0.5, 2.0 / 3.0}) {
        for (double c : {0.0, 0.5, 1.0}) {
            ok &= std::abs(reliability(r, c, r)) <= 1e-12;
        }
    }
    report_criterion(3, "reliability zero-level at acc_rand, exponent_m(0.5)=1", ok);
}

// Criterion 4: the certainty guarantee holds on the whole grid; the accuracy
// guarantee holds on the r=0.5 slice; the checker always classifies like the
// direct inequality.
void criterion_guarantees() {
    bool cert_bound_ok = true;
    bool half_slice_ok = true;
    bool checker_ok = true;
    int violations_off_half = 0;
    const double grid_r[4] = {0.27, 1.0 / 3.0, 0.5, 2.0 / 3.0};
    for (int ia = 0; ia < 100; ++ia) {
        double a = ia / 99.0;
        for (int ic = 0; ic < 100; ++ic) {
            double c = ic / 99.0;
            for (double r : grid_r) {
                double rel = reliability(a, c, r);
                double acc_calib = calibrate(a, r);
                cert_bound_ok &= std::abs(rel) <= c + 1e-12;
                bool direct = rel > 0.0 ? acc_calib >= rel
                                        : (rel < 0.0 ? acc_calib <= rel : true);
                GuaranteeReport checked = check_guarantees(rel, acc_calib, c);
                checker_ok &= checked.acc_bound_holds == direct;
                checker_ok &= checked.cert_bound_holds == (c >= std::abs(rel));
                if (r == 0.5) {
                    half_slice_ok &= direct;
                } else if (!direct) {
                    ++violations_off_half;
                }
            }
        }
    }
    report_criterion(4, "guarantee bounds (certainty universal, accuracy on r=0.5)",
                     cert_bound_ok && half_slice_ok && checker_ok,
                     std::to_string(violations_off_half) +
                         " accuracy-bound violations off the r=0.5 slice");
}

// Criterion 5: conformal coverage of the noisy model at alpha = 0.1.
void criterion_coverage() {
    auto start = std::chrono::steady_clock::now();
    DatasetHandle calib_set = make_synthetic_dataset(2000, 4, 1, 101, "cov-calib");
    DatasetHandle eval_set = make_synthetic_dataset(2000, 4, 1, 202, "cov-eval");
    SyntheticModelSpec spec{SyntheticKind::noisy, 0.8, 3.0, 7, "noisy"};

    std::vector<MergedScores> calibration;
    for (const Prompt& p : calib_set.prompts) {
        ResponseRecord rec = respond(spec, p);
        calibration.push_back(merge_correct(*rec.option_scores, p.answer_key.correct));
    }
    CalibrationModel model = fit_lac(calibration, 0.1);

    int covered = 0;
    for (const Prompt& p : eval_set.prompts) {
        ResponseRecord rec = respond(spec, p);
        MergedScores merged = merge_correct(*rec.option_scores, p.answer_key.correct);
        if (predict_set(model, merged).contains_correct()) ++covered;
    }
    double coverage = covered / 2000.0;
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report_criterion(5, "conformal coverage >= 0.88 at alpha=0.1",
                     coverage >= 0.88 && elapsed < 10.0,
                     "coverage " + std::to_string(coverage) + ", " + std::to_string(elapsed) +
                         " s");
}

// Shared pipeline fixture: a synthetic dataset plus LR-I and LS-N children.
std::vector<DatasetHandle> pipeline_datasets(int n, std::uint64_t seed) {
    std::vector<DatasetHandle> out;
    out.push_back(make_synthetic_dataset(n, 2, 1, seed));
    auto rewriter = make_rule_rewriter();
    DatasetHandle varied;
    varied.dataset_id = out[0].dataset_id;
    varied.style = out[0].style;
    for (const Prompt& p : out[0].prompts) {
        for (VariationTag tag : {VariationTag::LR_I, VariationTag::LS_N}) {
            VariationResult r = apply_language_variation(p, tag, *rewriter);
            if (r.status == VariationResult::Status::ok)
                varied.prompts.push_back(std::move(*r.prompt));
        }
    }
    out.push_back(std::move(varied));
    return out;
}

ResponseLog respond_everywhere(const SyntheticModelSpec& spec,
                               const std::vector<DatasetHandle>& datasets) {
    ResponseLog log;
    log.model_id = spec.model_id;
    for (const DatasetHandle& d : datasets) {
        ResponseLog part = respond_all(spec, d);
        log.records.insert(log.records.end(), part.records.begin(), part.records.end());
    }
    return log;
}

// Criterion 6: oracle / anti-oracle / uniform pipeline endpoints.
void criterion_pipeline_endpoints() {
    bool ok = true;
    std::string detail;

    {
        std::vector<DatasetHandle> datasets = pipeline_datasets(200, 31);
        std::vector<ResponseLog> logs = {
            respond_everywhere({SyntheticKind::oracle, 1.0, 5.0, 0, "oracle"}, datasets)};
        Report report = aggregate(logs, datasets, EvalConfig{});
        for (const ReportCell& cell : report.cells) {
            if (cell.status != CellStatus::ok) continue;
            for (const std::optional<double>& value :
                 {cell.bundle.acc_calib, cell.bundle.cert_calib, cell.bundle.cons_calib,
                  cell.bundle.rel_calib}) {
                if (value && std::abs(*value - 1.0) > 1e-9) {
                    ok = false;
                    detail = "oracle calibrated score " + std::to_string(*value);
                }
            }
        }
    }
    {
        std::vector<DatasetHandle> datasets = pipeline_datasets(200, 32);
        std::vector<ResponseLog> logs = {
            respond_everywhere({SyntheticKind::anti_oracle, 0.0, 5.0, 0, "anti"}, datasets)};
        Report report = aggregate(logs, datasets, EvalConfig{});
        for (const ReportCell& cell : report.cells) {
            if (cell.status != CellStatus::ok) continue;
            if (cell.bundle.acc_calib && std::abs(*cell.bundle.acc_calib + 1.0) > 1e-9) {
                ok = false;
                detail = "anti-oracle acc_calib " + std::to_string(*cell.bundle.acc_calib);
            }
        }
    }
    {
        std::vector<DatasetHandle> datasets;
        datasets.push_back(make_synthetic_dataset(2000, 2, 1, 33));
        std::vector<ResponseLog> logs = {
            respond_everywhere({SyntheticKind::uniform, 0.0, 5.0, 4, "uniform"}, datasets)};
        Report report = aggregate(logs, datasets, EvalConfig{});
        for (const ReportCell& cell : report.cells) {
            if (cell.status != CellStatus::ok) continue;
            if (cell.bundle.acc_calib && std::abs(*cell.bundle.acc_calib) > 0.06) {
                ok = false;
                detail = "uniform acc_calib " + std::to_string(*cell.bundle.acc_calib);
            }
            if (cell.bundle.rel_calib && std::abs(*cell.bundle.rel_calib) > 0.06) {
                ok = false;
                detail = "uniform rel_calib " + std::to_string(*cell.bundle.rel_calib);
            }
        }
    }
    report_criterion(6, "pipeline endpoints (oracle 1.0, anti-oracle -1, uniform ~0)", ok, detail);
}

// Criterion 7: multi-correct merging.
void criterion_merging() {
    bool ok = true;
    SplitMix64 rng{55};
    for (int trial = 0; trial < 500; ++trial) {
        double a = rng.next_unit() + 0.01;
        double b = rng.next_unit() + 0.01;
        double c = rng.next_unit() + 0.01;
        double total = a + b + c;
        std::vector<std::pair<char, double>> scores = {
            {'A', a / total}, {'B', b / total}, {'C', c / total}};
        MergedScores merged = merge_correct(scores, LetterSet({'A', 'C'}));
        ok &= std::abs(merged.correct_pseudo - (scores[0].second + scores[2].second)) <= 1e-12;
        ok &= merged.effective_option_count() == 2;
    }
    report_criterion(7, "multi-correct merging sums scores, effective count 2", ok);
}

// Criterion 8: semantic answer-key algebra over the bundled toy dataset.
void criterion_semantic_keys() {
    bool ok = true;
    DatasetHandle toy = load_dataset(kDataDir / "toy" / "toy_comparative.jsonl");
    auto rewriter = make_rule_rewriter();

    std::vector<Prompt> semantic;
    for (const Prompt& p : toy.prompts) {
        for (VariationTag tag : {VariationTag::LS_N, VariationTag::LS_A, VariationTag::LS_M}) {
            VariationResult r = apply_language_variation(p, tag, *rewriter);
            if (r.status == VariationResult::Status::ok) semantic.push_back(*r.prompt);
        }
        semantic.push_back(swap_images(p));
    }
    DatasetHandle exchanged =
        exchange_filter(toy, load_annotations(kDataDir / "toy" / "toy_annotations.jsonl"));
    semantic.insert(semantic.end(), exchanged.prompts.begin(), exchanged.prompts.end());

    ok &= !semantic.empty();
    for (const Prompt& p : semantic) {
        for (char c : p.answer_key.correct.letters()) {
            ok &= !p.answer_key.original_correct.contains(c);
        }
        ok &= p.answer_key.correct.size() + p.answer_key.original_correct.size() ==
              p.options.size();
        // A response hitting the originally-correct option scores 0.
        for (char c : p.answer_key.original_correct.letters()) {
            ok &= accuracy(ModelChoice::of(c), p.answer_key) == 0;
        }
        for (char c : p.answer_key.correct.letters()) {
            ok &= accuracy(ModelChoice::of(c), p.answer_key) == 1;
        }
    }
    report_criterion(8, "semantic keys partition options; original answers score 0", ok,
                     std::to_string(semantic.size()) + " semantic prompts checked");
}

// Criterion 9: the exchange filter on the bundled annotated fixture.
void criterion_exchange_filter() {
    DatasetHandle toy = load_dataset(kDataDir / "toy" / "toy_comparative.jsonl");
    std::vector<ExchangeAnnotation> annotations =
        load_annotations(kDataDir / "toy" / "toy_annotations.jsonl");

    DatasetHandle filtered = exchange_filter(toy, annotations);
    bool ok = filtered.prompts.size() == 10;
    for (const Prompt& p : filtered.prompts) {
        ok &= p.parent_id != "tc-11";  // the singleton question is discarded
        const Prompt* parent = toy.find(p.parent_id);
        ok &= parent != nullptr;
        if (parent != nullptr) {
            ok &= !(p.answer_key.correct == parent->answer_key.correct);
            ok &= p.answer_key.original_correct == parent->answer_key.correct;
        }
    }

    fs::path out1 = fs::temp_directory_path() / "parc_accept_vse_1.jsonl";
    fs::path out2 = fs::temp_directory_path() / "parc_accept_vse_2.jsonl";
    save_dataset(filtered, out1);
    save_dataset(exchange_filter(toy, annotations), out2);
    ok &= read_file(out1) == read_file(out2);
    report_criterion(9, "exchange filter discards singletons, flips answers, reruns identically",
                     ok);
}

// Criterion 10: image-operation algebra.
void criterion_image_algebra() {
    bool ok = true;
    ImageBuffer img = ImageBuffer::filled(32, 32, 0, 0, 0);
    SplitMix64 rng{12};
    for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.next_below(256));

    // rotate90^4 == identity, checked through a PNG round-trip.
    fs::path png = fs::temp_directory_path() / "parc_accept_rot.png";
    ImageBuffer rotated = rotate90(rotate90(rotate90(rotate90(img))));
    write_png(rotated, png);
    ok &= read_image(png).pixels == img.pixels;

    // brighten(., 1.0) == identity.
    ok &= brighten(img, 1.0).pixels == img.pixels;

    // swap o swap == identity on images and keys.
    Prompt comparative;
    comparative.id = "acc-swap";
    comparative.dataset_id = "d";
    comparative.question = "Which side is fuller?";
    comparative.options = OptionSet({"Left", "Right"});
    comparative.answer_key.correct = LetterSet({'A'});
    comparative.answer_key.original_correct = LetterSet({'A'});
    comparative.images = {{ImageRole::left, "l.png", 0, 0}, {ImageRole::right, "r.png", 0, 0}};
    Prompt twice = swap_images(swap_images(comparative));
    ok &= twice.images[0].path == comparative.images[0].path;
    ok &= twice.images[1].path == comparative.images[1].path;
    ok &= twice.answer_key.correct == comparative.answer_key.correct;

    // blur against the brute-force double-precision convolution.
    double sigma = 2.0;
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        taps[static_cast<std::size_t>(k + radius)] =
            std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
        total += taps[static_cast<std::size_t>(k + radius)];
    }
    for (double& t : taps) t /= total;
    ImageBuffer blurred = blur(img, sigma);
    int worst = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int ky = -radius; ky <= radius; ++ky) {
                    int cy = std::min(std::max(y + ky, 0), img.height - 1);
                    for (int kx = -radius; kx <= radius; ++kx) {
                        int cx = std::min(std::max(x + kx, 0), img.width - 1);
                        acc += taps[static_cast<std::size_t>(ky + radius)] *
                               taps[static_cast<std::size_t>(kx + radius)] *
                               static_cast<double>(img.at(cx, cy)[c]);
                    }
                }
                int reference = static_cast<int>(
                    std::min(std::max(std::floor(acc + 0.5), 0.0), 255.0));
                worst = std::max(worst, std::abs(reference - static_cast<int>(blurred.at(x, y)[c])));
            }
        }
    }
    ok &= worst <= 1;
    report_criterion(10, "image-op algebra (rotate^4, swap^2, brighten 1.0, blur oracle)", ok,
                     "max blur deviation " + std::to_string(worst));
}

// Criterion 11: aggregate() versus an independent straight-line recomputation.
struct NaiveCell {
    double acc = -1.0;
    double acc_rand = -1.0;
    double acc_calib = -2.0;
    double cert = -1.0;
    bool has_cert = false;
    double cons = -1.0;
    bool has_cons = false;
    double cons_rand = -1.0;
    double cons_calib = -2.0;
    double rel = -2.0;
    double rel_calib = -2.0;
};

NaiveCell naive_recompute(const std::vector<DatasetHandle>& datasets, const ResponseLog& log,
                          VariationTag tag, double alpha, std::uint64_t calib_seed) {
    // Straight-line rederivation: no calls into the metric/conformal modules.
    std::map<std::string, const Prompt*> all_prompts;
    std::string dataset_id;
    for (const DatasetHandle& d : datasets) {
        dataset_id = d.dataset_id;
        for (const Prompt& p : d.prompts) all_prompts[p.id] = &p;
    }
    std::map<std::string, const ResponseRecord*> records;
    for (const ResponseRecord& rec : log.records) records[rec.prompt_id] = &rec;

    std::vector<const Prompt*> cell;  // sorted by id via the map
    for (const auto& [id, p] : all_prompts) {
        if (p->variation == tag && records.count(id)) cell.push_back(p);
    }

    NaiveCell out;
    double acc_sum = 0.0;
    double rand_sum = 0.0;
    for (const Prompt* p : cell) {
        ModelChoice choice = parse_choice(records[p->id]->raw_text, p->options);
        bool hit = !choice.is_unparsed() &&
                   std::find(p->answer_key.correct.letters().begin(),
                             p->answer_key.correct.letters().end(),
                             choice.letter()) != p->answer_key.correct.letters().end();
        acc_sum += hit ? 1.0 : 0.0;
        rand_sum += static_cast<double>(p->answer_key.correct.size()) /
                    static_cast<double>(p->options.size());
    }
    out.acc = acc_sum / static_cast<double>(cell.size());
    out.acc_rand = rand_sum / static_cast<double>(cell.size());
    out.acc_calib = out.acc >= out.acc_rand ? (out.acc - out.acc_rand) / (1.0 - out.acc_rand)
                                            : (out.acc - out.acc_rand) / out.acc_rand;

    // Certainty: LAC threshold over the calibration half, set sizes on the
    // evaluation half, all inline.
    std::vector<const Prompt*> scored;
    for (const Prompt* p : cell) {
        if (records[p->id]->option_scores &&
            p->answer_key.correct.size() < p->options.size())
            scored.push_back(p);
    }
    if (scored.size() >= 2) {
        std::vector<std::size_t> calib_idx;
        std::vector<std::size_t> eval_idx;
        split_calibration(scored.size(), cell_split_seed(calib_seed, dataset_id, log.model_id, tag),
                          calib_idx, eval_idx);
        auto merged_of = [&](const Prompt* p) {
            double pseudo = 0.0;
            std::vector<double> wrong;
            for (const auto& [letter, score] : *records[p->id]->option_scores) {
                bool is_correct = std::find(p->answer_key.correct.letters().begin(),
                                            p->answer_key.correct.letters().end(),
                                            letter) != p->answer_key.correct.letters().end();
                if (is_correct) pseudo += score;
                else wrong.push_back(score);
            }
            return std::make_pair(pseudo, wrong);
        };
        std::vector<double> nonconformity;
        for (std::size_t i : calib_idx) nonconformity.push_back(1.0 - merged_of(scored[i]).first);
        std::sort(nonconformity.begin(), nonconformity.end());
        std::size_t n = nonconformity.size();
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(static_cast<double>(n + 1) * (1.0 - alpha)));
        double qhat = rank > n ? 1.0 : std::min(1.0, nonconformity[rank - 1]);

        double cert_sum = 0.0;
        for (std::size_t i : eval_idx) {
            auto [pseudo, wrong] = merged_of(scored[i]);
            int member_count = 1.0 - pseudo <= qhat ? 1 : 0;
            for (double w : wrong) member_count += 1.0 - w <= qhat ? 1 : 0;
            if (member_count == 0) member_count = 1;  // argmax repair
            int count = 1 + static_cast<int>(wrong.size());
            cert_sum += static_cast<double>(count - member_count) / static_cast<double>(count - 1);
        }
        out.cert = cert_sum / static_cast<double>(eval_idx.size());
        out.has_cert = true;
        out.rel = (2.0 * out.acc - 1.0) * out.cert;
        double m = std::log(2.0) / std::log(1.0 / out.acc_rand);
        double powered = m == 1.0 ? out.acc : std::pow(out.acc, m);
        out.rel_calib = (2.0 * powered - 1.0) * out.cert;
    }

    // Consistency against the Original parent.
    if (tag != VariationTag::O) {
        bool semantic = answer_changes(tag);
        double cons_sum = 0.0;
        double rand_cons_sum = 0.0;
        int pairs = 0;
        for (const Prompt* p : cell) {
            auto parent_it = all_prompts.find(p->parent_id);
            if (parent_it == all_prompts.end() || !records.count(p->parent_id)) continue;
            ModelChoice varied = parse_choice(records[p->id]->raw_text, p->options);
            ModelChoice original = parse_choice(records[p->parent_id]->raw_text,
                                                parent_it->second->options);
            bool agree = !varied.is_unparsed() && !original.is_unparsed() &&
                         varied.letter() == original.letter();
            bool disagree = !varied.is_unparsed() && !original.is_unparsed() &&
                            varied.letter() != original.letter();
            cons_sum += (semantic ? disagree : agree) ? 1.0 : 0.0;
            double n1 = static_cast<double>(p->options.size());
            double n2 = static_cast<double>(parent_it->second->options.size());
            double agree_prob = std::min(n1, n2) / (n1 * n2);
            rand_cons_sum += semantic ? 1.0 - agree_prob : agree_prob;
            ++pairs;
        }
        if (pairs > 0) {
            out.cons = cons_sum / pairs;
            out.cons_rand = rand_cons_sum / pairs;
            out.has_cons = true;
            out.cons_calib = out.cons >= out.cons_rand
                                 ? (out.cons - out.cons_rand) / (1.0 - out.cons_rand)
                                 : (out.cons - out.cons_rand) / out.cons_rand;
        }
    }
    return out;
}

void criterion_naive_equivalence() {
    // 50 prompts x (O, LR-I, LR-C, LS-N) = 200 records.
    std::vector<DatasetHandle> datasets;
    datasets.push_back(make_synthetic_dataset(50, 3, 1, 77));
    auto rewriter = make_rule_rewriter();
    DatasetHandle varied;
    varied.dataset_id = datasets[0].dataset_id;
    varied.style = datasets[0].style;
    for (const Prompt& p : datasets[0].prompts) {
        for (VariationTag tag : {VariationTag::LR_I, VariationTag::LR_C, VariationTag::LS_N}) {
            VariationResult r = apply_language_variation(p, tag, *rewriter);
            if (r.status == VariationResult::Status::ok)
                varied.prompts.push_back(std::move(*r.prompt));
        }
    }
    datasets.push_back(std::move(varied));

    SyntheticModelSpec spec{SyntheticKind::noisy, 0.7, 2.5, 9, "noisy"};
    std::vector<ResponseLog> logs = {respond_everywhere(spec, datasets)};
    std::size_t record_count = logs[0].records.size();

    EvalConfig config;
    Report report = aggregate(logs, datasets, config);

    bool ok = record_count == 200;
    double worst = 0.0;
    auto compare = [&](double got, double want) {
        worst = std::max(worst, std::abs(got - want));
        ok &= std::abs(got - want) <= 1e-12;
    };
    for (VariationTag tag :
         {VariationTag::O, VariationTag::LR_I, VariationTag::LR_C, VariationTag::LS_N}) {
        NaiveCell naive = naive_recompute(datasets, logs[0], tag, config.alpha, config.calib_seed);
        const ReportCell* cell = nullptr;
        for (const ReportCell& c : report.cells) {
            if (c.variation == tag && c.model_id == "noisy") cell = &c;
        }
        if (cell == nullptr || cell->status != CellStatus::ok) {
            ok = false;
            continue;
        }
        compare(*cell->bundle.acc, naive.acc);
        compare(cell->bundle.baseline.acc_rand, naive.acc_rand);
        compare(*cell->bundle.acc_calib, naive.acc_calib);
        if (naive.has_cert) {
            compare(*cell->bundle.cert, naive.cert);
            compare(*cell->bundle.cert_calib, naive.cert);
            compare(*cell->bundle.rel, naive.rel);
            compare(*cell->bundle.rel_calib, naive.rel_calib);
        }
        if (naive.has_cons) {
            double got_cons = cell->bundle.cons_reph ? *cell->bundle.cons_reph
                                                     : *cell->bundle.cons_sem;
            compare(got_cons, naive.cons);
            compare(*cell->bundle.cons_calib, naive.cons_calib);
        }
    }
    report_criterion(11, "aggregate matches the independent naive recomputation", ok,
                     "max deviation " + std::to_string(worst) + ", " +
                         std::to_string(record_count) + " records");
}

// Criterion 12: byte-identical CLI runs across repeats and thread counts.
void criterion_cli_determinism(const std::string& parc_binary) {
    fs::path work = fs::temp_directory_path() / "parc_accept_cli";
    fs::remove_all(work);
    fs::create_directories(work / "datasets");

    std::vector<DatasetHandle> datasets = pipeline_datasets(60, 91);
    save_dataset(datasets[0], work / "datasets" / "base.jsonl");
    save_dataset(datasets[1], work / "datasets" / "varied.jsonl");
    SyntheticModelSpec spec{SyntheticKind::noisy, 0.75, 3.0, 17, "noisy"};
    save_responses(respond_everywhere(spec, datasets), work / "responses.jsonl");

    auto run = [&](const std::string& args) {
        std::string cmd = "\"" + parc_binary + "\" " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    std::string base = "eval --dataset-dir \"" + (work / "datasets").string() +
                       "\" --responses \"" + (work / "responses.jsonl").string() + "\"";
    bool ok = true;
    ok &= run(base + " --threads 1 --out \"" + (work / "r1.json").string() + "\"");
    ok &= run(base + " --threads 8 --out \"" + (work / "r8.json").string() + "\"");
    ok &= run(base + " --threads 1 --out \"" + (work / "r1b.json").string() + "\"");
    ok &= read_file(work / "r1.json") == read_file(work / "r8.json");
    ok &= read_file(work / "r1.json") == read_file(work / "r1b.json");

    for (const std::string& format : {std::string("md"), std::string("csv")}) {
        ok &= run("report --in \"" + (work / "r1.json").string() + "\" --format " + format +
                  " --out \"" + (work / ("a." + format)).string() + "\"");
        ok &= run("report --in \"" + (work / "r8.json").string() + "\" --format " + format +
                  " --out \"" + (work / ("b." + format)).string() + "\"");
        ok &= read_file(work / ("a." + format)) == read_file(work / ("b." + format));
    }
    report_criterion(12, "CLI eval+report byte-identical across runs and thread counts", ok);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: parc_acceptance <path-to-parc-cli>\n";
        return 2;
    }
    try {
        criterion_certainty();
        criterion_calibration();
        criterion_reliability_zero();
        criterion_guarantees();
        criterion_coverage();
        criterion_pipeline_endpoints();
        criterion_merging();
        criterion_semantic_keys();
        criterion_exchange_filter();
        criterion_image_algebra();
        criterion_naive_equivalence();
        criterion_cli_determinism(argv[1]);
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return 1;
    }
    if (g_failures > 0) {
        std::cout << g_failures << " criteria FAILED\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
