#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace polcascade {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, ranges, grids or configuration. CLI exit code 1.
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// An adaptive integration or optimization did not settle. CLI exit code 2.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, std::complex<double> previous,
                     std::complex<double> last)
      : Error(what), m_previous(previous), m_last(last)
    {
    }

    /// Last two estimates before giving up.
    std::complex<double> previous() const { return m_previous; }
    std::complex<double> last() const { return m_last; }

private:
    std::complex<double> m_previous;
    std::complex<double> m_last;
};

/// Spectral windows that capture no measurable emission.
class EmptyWindowError : public Error
{
public:
    using Error::Error;
};

/// An objective that does not vary over the search range has no maximizer.
class FlatObjectiveError : public Error
{
public:
    using Error::Error;
};

}  // namespace polcascade
