#pragma once
// Per-prompt accuracy and consistency indicators, the reliability score,
// random-performance baselines, the generic score calibration, the
// reliability guarantee checks and the UAcc comparison metric.

#include <optional>
#include <span>
#include <utility>

#include "parc/core.hpp"

namespace parc {

// 1 iff the choice is a letter in key.correct. Unparsed scores 0, and so
// does any letter outside the correct set; in particular a letter that was
// correct before a semantic change (original_correct \ correct) scores 0.
int accuracy(ModelChoice choice, const AnswerKey& key);

enum class ConsistencyKind { reformulation, semantic };

// Agreement indicator between the varied and the original response:
// reformulations demand equal letters, semantic changes demand different
// ones. An Unparsed response on either side scores 0 for both kinds.
int consistency(ModelChoice varied, ModelChoice original, ConsistencyKind kind);

// m = log(2) / log(1 / acc_rand); m(0.5) = 1 exactly. Requires acc_rand in (0,1).
double exponent_m(double acc_rand);

// rel = (2 * acc^m - 1) * cert with m = exponent_m(acc_rand), evaluated on
// cell-level mean accuracy and mean certainty. Zero at acc = acc_rand for
// any certainty; the plain (2*acc - 1)*cert form is the acc_rand = 0.5 case.
double reliability(double acc_mean, double cert_mean, double acc_rand);

// Rescales a score against its expected random level: 1 ideal, 0 random,
// -1 worst case. Gap above the baseline is measured against (1 - s_rand),
// gap below against s_rand. Requires s_rand in (0,1).
double calibrate(double s, double s_rand);

// Mean over prompts of |correct| / |options|.
double random_accuracy(std::span<const Prompt> prompts);
double random_accuracy(std::span<const Prompt* const> prompts);

// Expected consistency of two independent uniform-random answerers over the
// paired prompts' option letters, averaged over pairs. For a pair with n1
// and n2 options the agreement probability is min(n1,n2) / (n1*n2);
// the semantic kind is its complement.
double random_consistency(
    std::span<const std::pair<const Prompt*, const Prompt*>> pairs, ConsistencyKind kind);

// Expected random performance per (dataset, variation) cell. Consistency
// baselines exist only where varied/original pairs exist.
struct RandomBaseline {
    double acc_rand = 0.0;
    std::optional<double> cons_rand_reph;
    std::optional<double> cons_rand_sem;
};

struct GuaranteeReport {
    bool cert_bound_holds = false;  // cert >= |rel|
    bool acc_bound_holds = false;   // acc_calib >= rel for rel > 0, <= rel for rel < 0
};

// Evaluates both reliability guarantees as a diagnostic; never asserts.
// At rel == 0 both bounds are vacuous and report true.
GuaranteeReport check_guarantees(double rel, double acc_calib, double cert);

// Uncertainty-aware accuracy acc / |C| * sqrt(|P|). Its maximum grows with
// the option count, which is why it is not comparable across datasets.
double uacc(double acc, int set_size, int option_count);

// Raw and calibrated cell scores. Calibrated fields are present iff the raw
// field and the matching baseline are. Certainty is already on the
// calibrated scale by construction (a random scorer yields full prediction
// sets, i.e. cert = 0), so cert_calib mirrors cert.
struct MetricBundle {
    std::optional<double> acc;
    std::optional<double> cert;
    std::optional<double> cons_reph;
    std::optional<double> cons_sem;
    std::optional<double> rel;  // plain form, acc_rand = 0.5

    std::optional<double> acc_calib;
    std::optional<double> cert_calib;
    std::optional<double> cons_calib;
    std::optional<double> rel_calib;

    RandomBaseline baseline;
    int n = 0;
};

}  // namespace parc
