#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppnac {

// Base for every error raised by the library. `kind()` is a stable tag that
// ends up in machine-readable failure records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    [[nodiscard]] const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define PPNAC_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(#Name, what) {}      \
    }

PPNAC_DEFINE_ERROR(DimensionMismatch);
PPNAC_DEFINE_ERROR(SingularSystem);
PPNAC_DEFINE_ERROR(NotStronglyConnected);
PPNAC_DEFINE_ERROR(NotHurwitz);
PPNAC_DEFINE_ERROR(NonpositiveGain);
PPNAC_DEFINE_ERROR(ZeroRowDegree);
PPNAC_DEFINE_ERROR(SingularInput);
PPNAC_DEFINE_ERROR(MissingBounds);
PPNAC_DEFINE_ERROR(ParseError);

#undef PPNAC_DEFINE_ERROR

// Normalized error left the open funnel (-delta_under, delta_bar).
// Agent/channel/time are filled in by the simulator when known (-1 / NaN otherwise).
class OutOfEnvelope : public Error {
public:
    explicit OutOfEnvelope(const std::string& what, double t = std::numeric_limits<double>::quiet_NaN(),
                           int agent = -1, int channel = -1)
        : Error("OutOfEnvelope", what), t_(t), agent_(agent), channel_(channel) {}

    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] int agent() const noexcept { return agent_; }
    [[nodiscard]] int channel() const noexcept { return channel_; }

private:
    double t_;
    int agent_;
    int channel_;
};

class NonFiniteState : public Error {
public:
    NonFiniteState(const std::string& what, double t)
        : Error("NonFiniteState", what), t_(t) {}

    [[nodiscard]] double time() const noexcept { return t_; }

private:
    double t_;
};

// Collects every failed scenario invariant; each message starts with the
// dotted config path of the offending field.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : Error("ValidationError", join(problems)), problems_(std::move(problems)) {}

    [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "scenario validation failed:";
        for (const auto& s : items) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

}  // namespace ppnac
