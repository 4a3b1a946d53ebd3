#pragma once

#include "amm/distributions.hpp"
#include "amm/mechanism.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace amm {

using DensityFn = std::function<double(std::span<const double>)>;

// One (d-1)-face {x : x[axis] = side} of the unit cube with a surface density.
// The density is evaluated at full d-vectors whose `axis` entry equals `side`.
struct BoundaryFace {
    std::size_t axis = 0;
    int side = 0;  // 0 or 1
    DensityFn density;
};

struct PointMass {
    std::vector<double> location;
    double mass = 0.0;
};

// Signed measure mu = boundary - interior + point masses, kept as its three
// components: interior density  -(grad f . (x - pi) + (d + 1 - div pi) f),
// face densities f (x - pi) . n, and the unit mass at the belief c.
struct SignedMeasure {
    std::size_t dim = 0;
    DensityFn interior;
    std::vector<BoundaryFace> faces;
    std::vector<PointMass> points;
};

SignedMeasure build_measure(const ValuationDistribution& dist, const UpdateModel& upd);

struct IntegrationOptions {
    std::size_t order = 64;       // Gauss-Legendre nodes per panel and axis
    std::size_t panels = 8;       // panels per axis
    std::size_t mc_samples = 10'000'000;  // interior integration for d = 3
    std::uint64_t seed = 0x5eed;
};

struct IntegralEstimate {
    double value = 0.0;
    double std_error = 0.0;  // nonzero only when Monte Carlo is used
};

using ScalarFn = std::function<double(std::span<const double>)>;

// Integral of u against the measure: tensor Gauss-Legendre in the interior for
// d <= 2 (Monte Carlo for d = 3), Gauss-Legendre on each face, exact point terms.
IntegralEstimate integrate_u(const SignedMeasure& mu, const ScalarFn& u, const IntegrationOptions& opt = {});
IntegralEstimate integrate_u(const SignedMeasure& mu, const Menu& menu, const IntegrationOptions& opt = {});

struct MeasureMasses {
    double interior = 0.0;
    std::vector<double> faces;  // same order as SignedMeasure::faces
    double points = 0.0;
    double total = 0.0;
};

MeasureMasses component_masses(const SignedMeasure& mu, const IntegrationOptions& opt = {});

struct LinearizationCheck {
    double profit = 0.0;        // Monte Carlo expected profit
    double profit_se = 0.0;
    double integral = 0.0;      // integral of u against mu
    double integral_se = 0.0;
    double residual = 0.0;      // |profit - integral|
    double combined_se = 0.0;
};

// Compares expected profit with the integral of the menu's utility against the
// transformed measure. The point-mass term needs u(c) = 0, so infeasible menus
// are rejected.
LinearizationCheck linearization_residual(const Menu& menu, const ValuationDistribution& dist,
                                          const UpdateModel& upd, std::size_t n, std::uint64_t seed,
                                          const IntegrationOptions& opt = {});

}  // namespace amm
