#pragma once

#include <stdexcept>
#include <string>

namespace tempsense {

// Problems with input data or physically impossible requests. The CLI maps
// these to exit code 2; genuine usage errors stay std::invalid_argument.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested inlet temperature at or above the hot-surface temperature: no
// airflow can remove the heat.
class InfeasibleCoolingError : public DataError {
public:
    explicit InfeasibleCoolingError(const std::string& what) : DataError(what) {}
};

// A finite difference straddles the economizer/chiller switch, where the
// derivative is undefined.
class ModeBoundaryError : public DataError {
public:
    explicit ModeBoundaryError(const std::string& what) : DataError(what) {}
};

}  // namespace tempsense
