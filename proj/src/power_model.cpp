#include "adepos/power_model.hpp"

#include <cmath>

#include "adepos/errors.hpp"
#include "adepos/neuron_gen.hpp"

namespace adepos {

namespace {

struct OpSplit {
    std::uint64_t mul = 0;
    std::uint64_t add = 0;
};

// One direct inference: per neuron d multiplies and d adds (sum + bias) in
// the first layer; L multiplies and L-1 adds per learner in the second.
OpSplit split_orig(std::uint64_t d, std::uint64_t L, std::uint64_t n) {
    return {n * (d * L + L), n * (d * L + L - 1)};
}

// NG inference: the pool's l_phy neurons are evaluated once (d multiplies,
// d adds each); every virtual neuron costs one subtraction; the output
// layer is unchanged.
OpSplit split_ng(std::uint64_t d, std::uint64_t L, std::uint64_t n, std::uint64_t l_phy) {
    return {l_phy * d + n * L, l_phy * d + n * L + n * (L - 1)};
}

} // namespace

OpCount op_count_orig(int d, int L, int n) {
    if (d < 1 || L < 1 || n < 1) throw InvalidDimension("op_count_orig needs d, L, n >= 1");
    const auto du = static_cast<std::uint64_t>(d);
    const auto Lu = static_cast<std::uint64_t>(L);
    const auto nu = static_cast<std::uint64_t>(n);
    OpCount c;
    c.input_layer_ops = 2 * nu * du * Lu;
    c.output_layer_ops = nu * Lu + (Lu - 1) * nu;
    c.total = c.input_layer_ops + c.output_layer_ops;
    return c;
}

OpCount op_count_ng_pool(int d, int L, int n, int l_phy) {
    if (d < 1 || L < 1 || n < 1 || l_phy < 2)
        throw InvalidDimension("op_count_ng needs d, L, n >= 1 and l_phy >= 2");
    const auto du = static_cast<std::uint64_t>(d);
    const auto Lu = static_cast<std::uint64_t>(L);
    const auto nu = static_cast<std::uint64_t>(n);
    const auto pu = static_cast<std::uint64_t>(l_phy);
    OpCount c;
    c.input_layer_ops = 2 * pu * du + nu * Lu;
    c.output_layer_ops = nu * Lu + (Lu - 1) * nu;
    c.total = c.input_layer_ops + c.output_layer_ops;
    return c;
}

OpCount op_count_ng(int d, int L, int n) {
    return op_count_ng_pool(d, L, n, required_physical_neurons(L, n));
}

std::uint64_t run_op_count(const LifetimeReport& report, int d, bool ng) {
    if (d < 1 || report.L < 1) throw InvalidDimension("run_op_count needs d, L >= 1");
    const int l_phy = ng ? required_physical_neurons(report.L, report.n_max) : 0;
    std::uint64_t total = 0;
    for (const auto& s : report.samples) {
        if (s.executed < 1) continue;
        total += ng ? op_count_ng_pool(d, report.L, s.executed, l_phy).total
                    : op_count_orig(d, report.L, s.executed).total;
    }
    return total;
}

double modeled_energy(const LifetimeReport& report, int d, bool ng, const PerOpCost& cost) {
    if (cost.mac < 0.0 || cost.add < 0.0) throw InvalidParams("per-op costs must be >= 0");
    const int l_phy = ng ? required_physical_neurons(report.L, report.n_max) : 0;
    double joules = 0.0;
    for (const auto& s : report.samples) {
        if (s.executed < 1) continue;
        const auto du = static_cast<std::uint64_t>(d);
        const auto Lu = static_cast<std::uint64_t>(report.L);
        const auto nu = static_cast<std::uint64_t>(s.executed);
        const OpSplit split = ng ? split_ng(du, Lu, nu, static_cast<std::uint64_t>(l_phy))
                                 : split_orig(du, Lu, nu);
        joules += cost.mac * static_cast<double>(split.mul) +
                  cost.add * static_cast<double>(split.add);
    }
    return joules;
}

double energy_savings(const LifetimeReport& baseline, bool baseline_ng,
                      const LifetimeReport& candidate, bool candidate_ng, int d,
                      const PerOpCost& cost) {
    const double denom = modeled_energy(candidate, d, candidate_ng, cost);
    if (denom <= 0.0) throw InvalidParams("candidate lifetime has zero modeled energy");
    return modeled_energy(baseline, d, baseline_ng, cost) / denom;
}

double system_energy(const EnergyParams& p) {
    if (p.eta_sta <= 0.0 || p.eta_sta > 1.0 || p.eta_dyn <= 0.0 || p.eta_dyn > 1.0)
        throw InvalidEfficiency("converter efficiencies must be in (0, 1]");
    if (p.v_out_sta < 0.0 || p.i_core_sta < 0.0 || p.t_sleep < 0.0 || p.v_out_dyn < 0.0 ||
        p.i_core_dyn < 0.0 || p.t_active < 0.0)
        throw InvalidParams("energy parameters must be nonnegative");
    return p.v_out_sta * p.i_core_sta * p.t_sleep / p.eta_sta +
           p.v_out_dyn * p.i_core_dyn * p.t_active / p.eta_dyn;
}

double buck_ripple(const BuckParams& b) {
    if (b.c_out <= 0.0 || b.l_ind <= 0.0 || b.v_batt <= 0.0 || b.v_out <= 0.0 || b.t_on <= 0.0 ||
        b.r_esr < 0.0)
        throw InvalidParams("buck parameters must be positive (r_esr may be zero)");
    if (b.v_out >= b.v_batt) throw InvalidParams("buck needs v_out < v_batt");
    return (b.r_esr + b.t_on * b.v_batt / (2.0 * b.c_out * b.v_out)) *
           (b.v_batt - b.v_out) * b.t_on / b.l_ind;
}

double aot_on_time(const AotParams& a, double v_batt, double v_out) {
    const double denom = (a.k2 * v_batt - a.k3 * v_out) + a.k4;
    if (denom <= 0.0) throw NonPositiveDenominator("on-time denominator must be positive");
    return a.k1 * v_batt / denom;
}

double pmos_current(double k, double v_th, double v_sg) {
    const double overdrive = v_sg - std::fabs(v_th);
    return overdrive > 0.0 ? k * overdrive * overdrive : 0.0;
}

AotParams aot_constants_from_circuit(double C, double R, double k, double v_th, double v_sg1,
                                     double v_sg2) {
    if (C <= 0.0 || R <= 0.0 || k < 0.0) throw InvalidCircuitParams("need C, R > 0 and k >= 0");
    if (!(v_sg1 < v_sg2)) throw InvalidCircuitParams("need v_sg1 < v_sg2");

    // secant slope of the quadratic over [v_sg1, v_sg2]
    const double k3 = k * (v_sg1 + v_sg2 - 2.0 * std::fabs(v_th));
    const double k4 = pmos_current(k, v_th, v_sg1) - k3 * v_sg1;

    AotParams a;
    a.k1 = 2.0 * C / 3.0;
    a.k2 = k3 + 2.0 / (3.0 * R);
    a.k3 = k3;
    a.k4 = k4;
    return a;
}

} // namespace adepos
