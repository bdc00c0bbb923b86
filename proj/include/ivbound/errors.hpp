#ifndef IVBOUND_ERRORS_HPP
#define IVBOUND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ivbound {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyData : Error {
    EmptyData() : Error("empty data: no records supplied") {}
};

struct MissingArm : Error {
    explicit MissingArm(int z)
        : Error("instrument arm z=" + std::to_string(z) + " has zero records") {}
};

struct UnknownEstimand : Error {
    explicit UnknownEstimand(const std::string& name)
        : Error("unknown estimand: " + name) {}
};

struct AllZeroAlpha : Error {
    AllZeroAlpha() : Error("dirichlet: every concentration parameter is zero") {}
};

struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& msg)
        : Error("numerical failure: " + msg) {}
};

struct InfeasibleDraw : Error {
    InfeasibleDraw() : Error("bound requested for an infeasible draw") {}
};

struct AcceptanceStalled : Error {
    long long attempts;
    long long accepted;
    AcceptanceStalled(long long attempts_, long long accepted_)
        : Error("acceptance sampler stalled after " + std::to_string(attempts_) +
                " attempts with " + std::to_string(accepted_) +
                " acceptances; IV assumptions are likely violated"),
          attempts(attempts_),
          accepted(accepted_) {}
};

struct EmptySamples : Error {
    EmptySamples() : Error("quantile requested over an empty sample set") {}
};

struct InstanceTooLarge : Error {
    InstanceTooLarge() : Error("instance outside the fixed stratum-polytope family") {}
};

struct ZeroComplianceMass : Error {
    ZeroComplianceMass() : Error("closed form undefined: compliance mass is zero") {}
};

struct InfeasibleAtPlugIn : Error {
    InfeasibleAtPlugIn()
        : Error("empirical proportions lie outside the IV feasibility set") {}
};

struct AllDrawsInfeasible : Error {
    AllDrawsInfeasible() : Error("every posterior draw was infeasible") {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace ivbound

#endif  // IVBOUND_ERRORS_HPP
