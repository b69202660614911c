#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace capnet {

// Base for all simulator errors so callers can catch one type at the CLI
// boundary (exit code 1) and config errors separately (exit code 2).
class SimError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Scenario parameters that cannot describe a network (n < 2, nonpositive
// range, area too small for a reuse block, ...).
class InvalidScenarioError : public SimError {
   public:
    using SimError::SimError;
};

// Receiver coincident with an interferer; SINR undefined.
class SingularGeometryError : public SimError {
   public:
    using SimError::SimError;
};

// A link set with duplicate transmitters or a tx==rx link.
class MalformedScheduleError : public SimError {
   public:
    using SimError::SimError;
};

// Brute-force oracle asked to enumerate too many candidates.
class OracleSizeError : public SimError {
   public:
    using SimError::SimError;
};

// A route needs a relay in an empty cell (or an unreachable highway).
class RoutingHoleError : public SimError {
   public:
    using SimError::SimError;
};

// Metrics requested from a trace with zero deliveries.
class MetricsUndefinedError : public SimError {
   public:
    using SimError::SimError;
};

// Log-log fit with fewer than 3 usable points.
class FitUndefinedError : public SimError {
   public:
    using SimError::SimError;
};

// Config parse/validation failure. Collects every issue, not just the first.
class ConfigError : public std::runtime_error {
   public:
    explicit ConfigError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

   private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (const auto& e : v) {
            if (!s.empty()) s += "\n";
            s += e;
        }
        return s;
    }
    std::vector<std::string> issues_;
};

}  // namespace capnet
