#pragma once

#include <vector>

#include "bkhm/statistics.hpp"

namespace bkhm {

/// flux(l) = visc + drag + coriolis + noise + residual, per separation.
struct KHMBudget {
    SeparationGrid grid;
    std::vector<double> flux;
    std::vector<double> flux_std_error;
    std::vector<double> visc_term;
    std::vector<double> drag_term;
    std::vector<double> coriolis_term;
    std::vector<double> noise_term;
    std::vector<double> residual;
    std::vector<double> residual_rel;  ///< residual / max |term|
};

/// D(l) = -4 nu G'(l) + (4 alpha / l) int_0^l r G + (4 / l) int_0^l r Th - (4 / l) int_0^l r a.
/// The series' `origin` values anchor the l = 0 end.
KHMBudget khm_velocity_budget(const DiagnosticSeries& d_bar, const DiagnosticSeries& gamma_bar,
                              const DiagnosticSeries& ctheta_bar, const DiagnosticSeries& a_bar, double nu,
                              double alpha);

/// Same identity for the vorticity-side series.
KHMBudget khm_vorticity_budget(const DiagnosticSeries& frakD_bar, const DiagnosticSeries& frakC_bar,
                               const DiagnosticSeries& frakQ_bar, const DiagnosticSeries& fraka_bar, double nu,
                               double alpha);

/// Derivative of an even function of l sampled at `l` (with its value at 0),
/// sixth order on the reflected grid.
std::vector<double> even_derivative(const std::vector<double>& l, double f0, const std::vector<double>& f);

/// int_0^{l_i} r f(r) dr for an even f, piecewise quintic on the reflected grid.
std::vector<double> moment_integral(const std::vector<double>& l, double f0, const std::vector<double>& f);

}  // namespace bkhm
