#ifndef BILIP_ERROR_HPP
#define BILIP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bilip {

// Base class for every failure raised by the library. The CLI maps
// precondition_error to exit code 2 and numeric_error to exit code 1.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Caller handed in something the operation is not defined for.
class precondition_error : public error
{
public:
    using error::error;
};

// A numerical procedure ran out of budget before meeting its tolerance.
class numeric_error : public error
{
public:
    numeric_error(const std::string &what, double achieved)
        : error(what + " (achieved error " + std::to_string(achieved) + ")"),
          achieved_(achieved)
    {}

    double achieved_error() const noexcept { return achieved_; }

private:
    double achieved_;
};

inline void require(bool ok, const char *message)
{
    if (!ok)
        throw precondition_error(message);
}

} // namespace bilip

#endif
