#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "irsa_aoi/core.hpp"

namespace irsa_aoi {

/// Error-floor constants: the dominant stopping-set sizes nu, the number of
/// slots they occupy mu, and their multiplicities c. `degree` is the replica
/// count of the regular distribution the constants belong to.
struct ErrorFloorConstants {
    std::vector<int> nu{2, 3};
    std::vector<int> mu{3, 4};
    std::vector<int> c{1, 24};
    int degree = 3;

    /// Lambda(x) = x^3.
    static ErrorFloorConstants regular_degree_three() { return {}; }
};

/// Finite-length scaling constants for the waterfall region.
struct WaterfallConstants {
    double gamma = 0.784399;
    double g_star = 0.818469;
    double alpha0 = 0.497867;
    double beta0 = 0.964528;

    /// Lambda(x) = x^3.
    static WaterfallConstants regular_degree_three() { return {}; }
};

std::vector<std::string> error_floor_violations(const ErrorFloorConstants& consts);
std::vector<std::string> waterfall_violations(const WaterfallConstants& consts);

/// Gaussian tail probability Q(x) = P{N(0,1) > x}.
double q_function(double x);

/// Alternating sum phi(s) of the error-floor approximation; s_index is 1-based.
double phi(int s_index, double load, int m, const ErrorFloorConstants& consts = {});

/// Raw (unclamped) error-floor approximation. Binomials are evaluated in the
/// log domain so m in the thousands neither overflows nor underflows.
double plr_error_floor(double load, int m, const ErrorFloorConstants& consts = {});

/// Waterfall-region approximation; requires 0 < m*load/n <= 1.
double plr_waterfall(double load, int m, int n, const WaterfallConstants& consts = {});

/// Error floor plus waterfall, clamped to [0,1].
double plr_combined(double load, int m, int n, const ErrorFloorConstants& ef = {},
                    const WaterfallConstants& wf = {});

/// Load -> PLR samples. Loads strictly increasing; between samples the
/// value is interpolated, outside the range the end value is held.
struct EmpiricalPlrTable {
    enum class Interpolation { linear, log_linear };

    std::vector<double> loads;
    std::vector<double> plrs;
    Interpolation interpolation = Interpolation::linear;

    double at(double load) const;
};

/// Pluggable mapping from channel load to packet loss rate.
class PlrModel {
public:
    struct CombinedApprox {
        ErrorFloorConstants error_floor;
        WaterfallConstants waterfall;
    };
    struct Constant {
        double p = 0.0;
    };
    using Custom = std::function<double(double load, int m, int n)>;
    using Variant = std::variant<CombinedApprox, EmpiricalPlrTable, Constant, Custom>;

    PlrModel() : variant_(CombinedApprox{}) {}
    explicit PlrModel(Variant v);

    static PlrModel combined(ErrorFloorConstants ef = {}, WaterfallConstants wf = {})
    {
        return PlrModel(CombinedApprox{std::move(ef), std::move(wf)});
    }
    static PlrModel constant(double p) { return PlrModel(Constant{p}); }
    static PlrModel table(EmpiricalPlrTable t) { return PlrModel(std::move(t)); }
    static PlrModel custom(Custom fn) { return PlrModel(std::move(fn)); }

    /// PLR at channel load `load` for a frame of m slots and n users, in [0,1].
    double evaluate(double load, int m, int n) const;

    const Variant& variant() const noexcept { return variant_; }
    std::string name() const;

private:
    Variant variant_;
};

}  // namespace irsa_aoi
