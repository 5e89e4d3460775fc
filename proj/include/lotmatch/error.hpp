#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lotmatch {

// Process exit codes: 0 ok, 2 config error, 3 missing input, 4 data error.
enum class ErrorCode { Config = 2, MissingInput = 3, Data = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error config_error(std::string msg) { return Error(ErrorCode::Config, std::move(msg)); }
inline Error missing_input(std::string msg) { return Error(ErrorCode::MissingInput, std::move(msg)); }
inline Error data_error(std::string msg) { return Error(ErrorCode::Data, std::move(msg)); }

}  // namespace lotmatch
