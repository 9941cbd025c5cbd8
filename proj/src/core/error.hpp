// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace vf {

// Error categories; values line up with the CLI exit codes and the C API
// status enum (argument errors surface as config errors at the tool level).
enum class errc { argument = 1, config = 2, fit = 3, io = 4 };

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

}  // namespace vf
