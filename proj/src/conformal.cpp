#include "parc/conformal.hpp"

#include <algorithm>
#include <cmath>

namespace parc {

MergedScores merge_correct(const std::vector<std::pair<char, double>>& scores,
                           const LetterSet& correct) {
    if (correct.empty()) throw Error("merge_correct: empty correct set");
    if (correct.size() >= scores.size())
        throw Error("merge_correct: all options correct, no contrast class");
    MergedScores merged;
    for (const auto& [letter, score] : scores) {
        if (correct.contains(letter)) {
            merged.correct_pseudo += score;
        } else {
            merged.wrong.push_back(score);
        }
    }
    if (merged.wrong.empty()) throw Error("merge_correct: correct letters not found in scores");
    return merged;
}

CalibrationModel fit_lac(std::span<const MergedScores> calibration, double alpha) {
    if (calibration.empty()) throw Error("fit_lac: empty calibration set");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("fit_lac: alpha must be in (0,1)");

    std::vector<double> nonconformity;
    nonconformity.reserve(calibration.size());
    for (const MergedScores& m : calibration) nonconformity.push_back(1.0 - m.correct_pseudo);
    std::sort(nonconformity.begin(), nonconformity.end());

    const std::size_t n = nonconformity.size();
    const auto rank = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n + 1) * (1.0 - alpha)));  // 1-based
    CalibrationModel model;
    model.alpha = alpha;
    model.n_calib = static_cast<int>(n);
    model.qhat = rank > n ? 1.0 : std::min(1.0, nonconformity[rank - 1]);
    return model;
}

PredictionSet predict_set(const CalibrationModel& model, const MergedScores& scores) {
    PredictionSet set;
    set.effective_option_count = scores.effective_option_count();
    for (int i = 0; i < set.effective_option_count; ++i) {
        if (1.0 - scores.value_at(i) <= model.qhat) set.members.push_back(i);
    }
    if (set.members.empty()) {
        int argmax = 0;
        for (int i = 1; i < set.effective_option_count; ++i) {
            if (scores.value_at(i) > scores.value_at(argmax)) argmax = i;
        }
        set.members.push_back(argmax);
    }
    return set;
}

double certainty(int set_size, int effective_option_count) {
    if (effective_option_count < 2) throw Error("certainty: needs at least 2 effective options");
    if (set_size < 1 || set_size > effective_option_count)
        throw Error("certainty: set size out of range");
    return static_cast<double>(effective_option_count - set_size) /
           static_cast<double>(effective_option_count - 1);
}

}  // namespace parc
