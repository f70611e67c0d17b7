#include "parc/metrics.hpp"

#include <cmath>

namespace parc {

int accuracy(ModelChoice choice, const AnswerKey& key) {
    if (choice.is_unparsed()) return 0;
    return key.correct.contains(choice.letter()) ? 1 : 0;
}

int consistency(ModelChoice varied, ModelChoice original, ConsistencyKind kind) {
    if (varied.is_unparsed() || original.is_unparsed()) return 0;
    bool equal = varied.letter() == original.letter();
    return (kind == ConsistencyKind::reformulation ? equal : !equal) ? 1 : 0;
}

double exponent_m(double acc_rand) {
    if (!(acc_rand > 0.0 && acc_rand < 1.0)) throw Error("exponent_m: acc_rand must be in (0,1)");
    return std::log(2.0) / std::log(1.0 / acc_rand);
}

double reliability(double acc_mean, double cert_mean, double acc_rand) {
    double m = exponent_m(acc_rand);
    double powered = m == 1.0 ? acc_mean : std::pow(acc_mean, m);
    return (2.0 * powered - 1.0) * cert_mean;
}

double calibrate(double s, double s_rand) {
    if (!(s_rand > 0.0 && s_rand < 1.0)) throw Error("calibrate: s_rand must be in (0,1)");
    if (s >= s_rand) return (s - s_rand) / (1.0 - s_rand);
    return (s - s_rand) / s_rand;
}

double random_accuracy(std::span<const Prompt> prompts) {
    if (prompts.empty()) throw Error("random_accuracy: empty prompt list");
    double total = 0.0;
    for (const Prompt& p : prompts) {
        total += static_cast<double>(p.answer_key.correct.size()) /
                 static_cast<double>(p.options.size());
    }
    return total / static_cast<double>(prompts.size());
}

double random_accuracy(std::span<const Prompt* const> prompts) {
    if (prompts.empty()) throw Error("random_accuracy: empty prompt list");
    double total = 0.0;
    for (const Prompt* p : prompts) {
        total += static_cast<double>(p->answer_key.correct.size()) /
                 static_cast<double>(p->options.size());
    }
    return total / static_cast<double>(prompts.size());
}

double random_consistency(std::span<const std::pair<const Prompt*, const Prompt*>> pairs,
                          ConsistencyKind kind) {
    if (pairs.empty()) throw Error("random_consistency: empty pair list");
    double total = 0.0;
    for (const auto& [a, b] : pairs) {
        double n1 = static_cast<double>(a->options.size());
        double n2 = static_cast<double>(b->options.size());
        double agree = std::min(n1, n2) / (n1 * n2);
        total += kind == ConsistencyKind::reformulation ? agree : 1.0 - agree;
    }
    return total / static_cast<double>(pairs.size());
}

GuaranteeReport check_guarantees(double rel, double acc_calib, double cert) {
    GuaranteeReport report;
    report.cert_bound_holds = cert >= std::abs(rel);
    if (rel > 0.0) {
        report.acc_bound_holds = acc_calib >= rel;
    } else if (rel < 0.0) {
        report.acc_bound_holds = acc_calib <= rel;
    } else {
        report.acc_bound_holds = true;
    }
    return report;
}

double uacc(double acc, int set_size, int option_count) {
    if (!(acc >= 0.0 && acc <= 1.0)) throw Error("uacc: acc must be in [0,1]");
    if (set_size < 1 || set_size > option_count) throw Error("uacc: set size out of range");
    return acc / static_cast<double>(set_size) * std::sqrt(static_cast<double>(option_count));
}

}  // namespace parc
