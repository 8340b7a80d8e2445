/**
 * @file errors.hpp
 * @brief Exception types raised by the library.
 */
#ifndef OREC_ERRORS_HPP
#define OREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace orec {

/** \brief Base class of every library error. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/** \brief Exponent triple belongs to none of the regimes P, P1, P2. */
class RegimeError : public Error {
public:
    explicit RegimeError(const std::string& what) : Error(what) {}
};

/** \brief Argument outside the mathematical domain of an operation. */
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/** \brief Iterative procedure ran out of budget. */
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

/** \brief Vector length does not match the dimension. */
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error(what) {}
};

/** \brief A denominator of a closed form vanishes. */
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(what) {}
};

/** \brief Constraint integrals differ although the closed form needs them equal. */
class SymmetryError : public Error {
public:
    explicit SymmetryError(const std::string& what) : Error(what) {}
};

/** \brief Hypotheses of a theorem are violated. */
class HypothesisError : public Error {
public:
    explicit HypothesisError(const std::string& what) : Error(what) {}
};

/** \brief User supplied Laplacian filter violates the admissibility bound. */
class AAViolation : public Error {
public:
    explicit AAViolation(const std::string& what) : Error(what) {}
};

/** \brief Discrete constraints cannot share one multiplier. */
class AsymmetryError : public Error {
public:
    explicit AsymmetryError(const std::string& what) : Error(what) {}
};

/** \brief Instance too large for exhaustive search. */
class SizeError : public Error {
public:
    explicit SizeError(const std::string& what) : Error(what) {}
};

/** \brief Malformed configuration or input file. */
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace orec

#endif // OREC_ERRORS_HPP
