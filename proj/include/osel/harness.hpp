#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "osel/instance.hpp"
#include "osel/policies.hpp"

namespace osel {

// Experiment drivers behind the command-line tool. Every driver writes CSV
// to a caller-supplied stream and is deterministic for a fixed config.

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitCertificate = 3 };

/// Bad input data (instance files, order files); maps to kExitValidation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad flags or flag combinations; maps to kExitUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses {"boxes": [{"id": "...", "atoms": [[value, prob], ...]}, ...]}.
/// Probabilities off by at most 1e-9 in total are renormalized and a
/// warning is appended; anything worse is a ValidationError naming the box.
Instance parse_instance(const std::string& text, std::vector<std::string>* warnings = nullptr);
Instance load_instance(const std::string& path, std::vector<std::string>* warnings = nullptr);

enum class PolicyChoice { sta, tva, tvd, tva_rand_656, tvd_rand_732 };

PolicyChoice parse_policy(const std::string& name);
const char* to_string(PolicyChoice p);
bool is_randomized(PolicyChoice p);

/// given (file order), all (n! permutations), random:K, or a file with one
/// comma-separated id list per line.
struct OrderMode {
    enum class Kind { given, all, random, file } kind = Kind::given;
    std::size_t count = 0;
    std::string path;
};

OrderMode parse_order_mode(const std::string& text);

/// A number, "opt" (the online optimum of each order) or "phi" (prophet / phi).
struct TargetSpec {
    enum class Kind { value, opt, phi } kind = Kind::phi;
    double value = 0.0;
};

TargetSpec parse_target(const std::string& text);

struct ExperimentConfig {
    PolicyChoice policy = PolicyChoice::tva;
    TargetSpec g0;
    /// Threshold for sta; defaults to the best single threshold of the instance.
    std::optional<double> tau;
    OrderMode orders;
    /// Quadrature points for the randomized policies.
    int grid = 1000;
    std::optional<std::uint64_t> seed;
    bool force_enumeration = false;
    std::size_t runs = 100000;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Enumeration guard: more boxes than this need force_enumeration for "all".
inline constexpr std::size_t kMaxEnumeratedBoxes = 9;

std::vector<ArrivalOrder> resolve_orders(const Instance& instance, const ExperimentConfig& config);

struct RatioRow {
    std::size_t order_index = 0;
    std::string order;
    double opt = 0.0;
    double g0 = 0.0;
    double alg = 0.0;
    double ratio = 0.0;
};

struct RatioReport {
    std::vector<RatioRow> rows;
    double min_ratio = 0.0;
    std::size_t argmin = 0;
};

RatioReport cmd_eval(const Instance& instance, const ExperimentConfig& config);
void write_ratio_csv(std::ostream& os, const RatioReport& report);

struct HardnessConfig {
    int dual_grid = 10000;
    double primal_step = 1e-3;
    bool refine = false;
    bool inject_broken = false;
    double violation_tol = 1e-8;
};

/// Writes bound_name,grid,objective,max_violation rows and returns the exit code.
int cmd_hardness(const HardnessConfig& config, std::ostream& os);

struct SimulationRow {
    std::size_t order_index = 0;
    std::string order;
    std::size_t runs = 0;
    double mean = 0.0;
    double exact = 0.0;
    double z = 0.0;
};

/// Fixed number of logical random streams; results do not depend on the
/// number of threads.
inline constexpr std::size_t kSimulationStreams = 16;

std::vector<SimulationRow> cmd_simulate(const Instance& instance, const ExperimentConfig& config);
void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows);

/// Writes density,c,gamma,mass,envelope,min_ratio,argmin_y rows; returns the
/// exit code (kExitCertificate if a density misses its constant by > 1e-6).
int cmd_verify_density(int y_grid, std::ostream& os);

}  // namespace osel
