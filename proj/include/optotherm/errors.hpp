#pragma once

#include <stdexcept>
#include <string>

namespace optotherm {

// Bad configuration document or CLI flag set. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// The shifted transition frequency nu0 + delta reached zero while the bath was
// coupled. The thermal occupation diverges there and the model leaves its
// domain of validity. The CLI maps this to exit code 4.
class LevelCrossingError : public std::runtime_error {
  public:
    explicit LevelCrossingError(double shifted_freq, double t = -1.0)
        : std::runtime_error(describe(shifted_freq, t)),
          shifted_freq_(shifted_freq),
          t_(t) {}

    double shifted_freq() const { return shifted_freq_; }
    double time() const { return t_; }  // -1 when unknown at throw site

  private:
    static std::string describe(double f, double t) {
        std::string msg = "level crossing: shifted transition frequency " +
                          std::to_string(f) + " <= 0 with bath coupled";
        if (t >= 0.0) msg += " at t = " + std::to_string(t);
        return msg;
    }
    double shifted_freq_;
    double t_;
};

// Integration produced a non-finite state. The CLI maps this to exit code 3.
class IntegrationBlowupError : public std::runtime_error {
  public:
    IntegrationBlowupError(double t, long step, const std::string& snapshot)
        : std::runtime_error("integration blowup at t = " + std::to_string(t) +
                             " (step " + std::to_string(step) + "): " + snapshot),
          t_(t),
          step_(step) {}

    double time() const { return t_; }
    long step() const { return step_; }

  private:
    double t_;
    long step_;
};

// The running energy ledger violated the first law beyond 100x the documented
// tolerance. Indicates a bookkeeping bug, not a physics result.
class LedgerInconsistencyError : public std::runtime_error {
  public:
    explicit LedgerInconsistencyError(const std::string& msg)
        : std::runtime_error(msg) {}
};

}  // namespace optotherm
