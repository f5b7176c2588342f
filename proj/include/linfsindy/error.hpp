#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linfsindy {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (non-finite entries, wrong shapes).
class InputError : public Error {
public:
    using Error::Error;
};

/// Invalid solver or estimator settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Not enough samples to produce a result.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// A problem too large to enumerate.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Non-finite state hit during time integration.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, const std::string& what)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Objective returned a non-finite value inside the swarm.
class FitnessError : public Error {
public:
    FitnessError(std::size_t particle, std::size_t iteration, const std::string& what)
        : Error(what), particle_(particle), iteration_(iteration) {}
    std::size_t particle() const noexcept { return particle_; }
    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t particle_;
    std::size_t iteration_;
};

/// The linear program could not be solved (should not occur for finite full-rank data).
class LpError : public Error {
public:
    using Error::Error;
};

} // namespace linfsindy
