#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thlab/coefficients.hpp"
#include "thlab/model.hpp"
#include "thlab/spectral.hpp"

namespace thlab::cli {

// Bad flags or config contents; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class InitialKind { constant, pulse, box, noise };

struct InitialSpec {
    InitialKind kind = InitialKind::constant;
    cplx A{0.0, 0.0}, B{0.0, 0.0};
    double width = 1.0;       // slow length scale of pulse and box profiles
    double noise = 0.0;       // uniform noise amplitude added to the PDE fields
    bool well_prepared = true;  // include the eps^2 corrections in PDE data
};

struct RunConfig {
    ModelParams model;
    NonlinearityCoeffs nl;
    std::optional<AmplitudeCoefficients> gammas;  // overrides the computed ones

    int n = 1024;             // PDE collocation points
    int periods = 40;         // PDE box length in multiples of 2 pi
    int amp_n = 256;          // amplitude collocation points
    double amp_length = 0.0;  // slow box length, 0 means eps times the PDE box

    SimConfig sim;
    int snapshots = 10;
    std::vector<double> times;  // explicit snapshot times, overrides snapshots
    bool amp_full = false;      // full instead of averaged amplitude system

    InitialSpec initial;

    double c0 = 1.0;                 // front speed
    std::optional<double> c_g, c_v;  // override the model velocities

    unsigned long long seed = 0;
    std::string out_dir = "out";

    double pde_length() const;
    double slow_length() const;
    std::vector<double> snapshot_times() const;
    AmplitudeCoefficients coefficients() const;
    double group_velocity() const;
    double dispersion_velocity() const;

    bool operator==(const RunConfig&) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
std::string render_config(const RunConfig& c);

std::vector<double> parse_list(const std::string& s);
std::string render_list(const std::vector<double>& v);

}  // namespace thlab::cli
