#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "udw/detectors.hpp"
#include "udw/oracle.hpp"

namespace udw {

// Explicit list of grid values. Text forms: "x", "a,b,c", "start:stop:count",
// "start:stop:count:log".
struct Range {
    std::vector<double> values;

    static Range single(double v) { return {{v}}; }
    static Range linear(double start, double stop, int count);
    static Range logarithmic(double start, double stop, int count);
    static Range parse(const std::string& text);
};

enum class OutputFormat { Csv, Json };

struct OracleSettings {
    double tol = 1e-3;
    std::optional<double> start_T;  // default_start_T(wp) when empty
    int max_doublings = 12;
    QuadratureConfig quadrature;
};

struct SweepConfig {
    FieldModel model;
    Range omega = Range::single(1.0);
    Range sigma = Range::single(0.5);
    Range mass = Range::single(0.0);
    Range theta = Range::single(0.0);
    // Weight of the amplitude that couples: |alpha1|^2 (vector), |beta|^2 (complex),
    // |beta1|^2 (fermion, remainder in alpha1). Empty means use alpha/beta as given.
    Range mix;
    std::array<cplx, 2> alpha{};
    std::array<cplx, 2> beta{};
    Spinor4 spinor{cplx(0.0), cplx(0.0), cplx(1.0), cplx(0.0)};
    double k0 = 1.0;
    double lambda = 1.0;
    double delta = 1.0;
    std::string output_path;  // empty or "-" writes to the given stream
    OutputFormat format = OutputFormat::Csv;
    int workers = 1;
    std::optional<OracleSettings> oracle;
};

// Model defaults: vector alpha1 = 1, fermion beta1 = 1, complex beta = 1.
void apply_default_amplitudes(SweepConfig& cfg);

struct GridPoint {
    double omega = 0.0, sigma = 0.0, m = 0.0, theta = 0.0;
    DetectorSpec det;
    WavepacketSpec wp;
};

struct SweepRow {
    GridPoint point;
    double probability = 0.0;
    bool gated = false;
    // verify mode
    bool verified = false;
    bool converged = true;
    double oracle_total = 0.0;
    double vacuum = 0.0;
    double co_rotating = 0.0;
    double counter_rotating = 0.0;
    double final_T = 0.0;
    double deviation = 0.0;
    bool deviation_absolute = false;  // closed form is zero, deviation is |oracle|
    std::string error;
};

// Throws std::invalid_argument on an invalid configuration.
void validate(const SweepConfig& cfg);

// Grid points in lexicographic order of (sigma, m, theta, mix, omega) indices.
std::vector<GridPoint> expand_grid(const SweepConfig& cfg);

std::vector<SweepRow> run_scan(const SweepConfig& cfg);
std::vector<SweepRow> run_verify(const SweepConfig& cfg);

inline constexpr double zero_reference_tolerance = 1e-15;

std::string format_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
std::string format_json(const SweepConfig& cfg, const std::vector<SweepRow>& rows);
std::string format_number(double x);

// Write to a temporary file in the same directory, then rename over path.
void write_atomically(const std::string& path, const std::string& content);

SweepConfig load_config(const std::string& path);
SweepConfig parse_config_json(const std::string& text);

enum ExitCode { exit_success = 0, exit_validation = 1, exit_nonconvergence = 2 };

int cmd_scan(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const SweepConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_identities(int max_n, std::ostream& out);

}  // namespace udw
