#pragma once
// Split conformal prediction with the LAC nonconformity score
// s = 1 - p(correct), plus the certainty score derived from prediction-set
// size. Multiple correct answers are merged into a single pseudo-option
// before calibration and prediction so that coverage targets the event
// "some correct answer is in the set".

#include <span>
#include <utility>
#include <vector>

#include "parc/core.hpp"

namespace parc {

// Score distribution after collapsing all correct letters into one
// pseudo-option. Index 0 of the effective options is the pseudo-option,
// indices 1.. are the wrong letters in letter order.
struct MergedScores {
    double correct_pseudo = 0.0;
    std::vector<double> wrong;

    int effective_option_count() const { return 1 + static_cast<int>(wrong.size()); }
    double value_at(int index) const {
        return index == 0 ? correct_pseudo : wrong[static_cast<std::size_t>(index - 1)];
    }
};

// Sums the scores of all correct letters into the pseudo-option. Requires a
// non-empty correct set that leaves at least one wrong option, so the
// effective option count is always >= 2. Total mass is preserved.
MergedScores merge_correct(const std::vector<std::pair<char, double>>& scores,
                           const LetterSet& correct);

struct CalibrationModel {
    double alpha = 0.1;
    double qhat = 1.0;  // empirical quantile of nonconformity scores, capped at 1
    int n_calib = 0;
};

// Fits the threshold qhat as the ceil((n+1)(1-alpha))/n empirical quantile
// of {1 - p(correct pseudo)} over the calibration items; qhat = 1 when the
// index exceeds n. Throws on an empty calibration set or alpha outside (0,1).
CalibrationModel fit_lac(std::span<const MergedScores> calibration, double alpha);

struct PredictionSet {
    std::vector<int> members;  // indices into the effective options, never empty
    int effective_option_count = 0;

    bool contains_correct() const {
        for (int m : members)
            if (m == 0) return true;
        return false;
    }
    int size() const { return static_cast<int>(members.size()); }
};

// Members are the effective options with 1 - p(option) <= qhat. An empty
// threshold set is repaired to the argmax singleton so the set is never
// empty (argmax ties resolve to the lowest index).
PredictionSet predict_set(const CalibrationModel& model, const MergedScores& scores);

// cert = (|P| - |C|) / (|P| - 1): 1 when only one option remains likely,
// 0 when the set contains every option. Requires
// 1 <= set_size <= effective_option_count and effective_option_count >= 2.
double certainty(int set_size, int effective_option_count);

}  // namespace parc
