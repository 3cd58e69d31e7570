#pragma once

#include <cstdint>

#include "adepos/ensemble.hpp"

namespace adepos {

// Multiply/addition counts for one inference pass. Every entry counts a
// single multiply, add or subtract.
struct OpCount {
    std::uint64_t input_layer_ops = 0;
    std::uint64_t output_layer_ops = 0;
    std::uint64_t total = 0;
};

// N base learners of L neurons each evaluating a d-dimensional input
// directly: 2NdL first-layer ops plus NL + (L-1)N output-layer ops.
OpCount op_count_orig(int d, int L, int n);

// Same network with the first layer served by a shared physical pool of
// required_physical_neurons(L, n) neurons: pool ops are paid once, each
// virtual neuron costs one subtraction.
OpCount op_count_ng(int d, int L, int n);

// Per-sample ops of an NG network whose pool was sized for `l_phy` physical
// neurons but only `n` learners executed (pool cost still paid once).
OpCount op_count_ng_pool(int d, int L, int n, int l_phy);

// Total ops across a recorded lifetime: each sample is charged with the
// number of learners that actually executed; a pool sized for the report's
// n_max is charged once per sample when ng is set.
std::uint64_t run_op_count(const LifetimeReport& report, int d, bool ng);

// Configurable per-operation energies (joules).
struct PerOpCost {
    double mac = 1.0;
    double add = 1.0;
};

// Op-proxy energy of a lifetime: multiplies at `mac`, additions and
// subtractions at `add`.
double modeled_energy(const LifetimeReport& report, int d, bool ng, const PerOpCost& cost);

// Ratio of modeled energies, baseline over candidate.
double energy_savings(const LifetimeReport& baseline, bool baseline_ng,
                      const LifetimeReport& candidate, bool candidate_ng, int d,
                      const PerOpCost& cost);

// Duty-cycled operating point: sleep and active phases with their converter
// efficiencies.
struct EnergyParams {
    double v_out_sta = 0.0;
    double i_core_sta = 0.0;
    double t_sleep = 0.0;
    double eta_sta = 1.0;
    double v_out_dyn = 0.0;
    double i_core_dyn = 0.0;
    double t_active = 0.0;
    double eta_dyn = 1.0;
};

// E = V_sta*I_sta*T_sleep/eta_sta + V_dyn*I_dyn*T_active/eta_dyn
double system_energy(const EnergyParams& p);

// Buck converter in discontinuous conduction.
struct BuckParams {
    double r_esr = 0.0; // ohm
    double c_out = 0.0; // farad
    double l_ind = 0.0; // henry
    double v_batt = 0.0;
    double v_out = 0.0;
    double t_on = 0.0; // second
};

// dV = (R_esr + T_on*V_batt / (2*C_out*V_out)) * (V_batt - V_out)*T_on / L
double buck_ripple(const BuckParams& b);

// On-time law T_on = k1*V_batt / ((k2*V_batt - k3*V_out) + k4).
struct AotParams {
    double k1 = 0.0;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
};

double aot_on_time(const AotParams& a, double v_batt, double v_out);

// Derive the on-time constants from the timing-circuit elements: capacitor
// C charges through resistor R and a PMOS whose quadratic current
// k*(V_sg - |V_th|)^2 is linearized over [v_sg1, v_sg2]. The linearization
// is the secant, exact at both anchor voltages.
AotParams aot_constants_from_circuit(double C, double R, double k, double v_th, double v_sg1,
                                     double v_sg2);

// Quadratic PMOS current, zero below threshold.
double pmos_current(double k, double v_th, double v_sg);

} // namespace adepos
