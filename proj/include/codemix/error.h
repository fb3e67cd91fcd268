// Copyright 2026 The Codemix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CODEMIX_ERROR_H_
#define CODEMIX_ERROR_H_

#include <stdexcept>
#include <string>

namespace codemix {

// Broad failure classes; the CLI maps each one onto a process exit code.
enum class ErrorKind {
  kConfig,     // bad flags, missing assets, out-of-range parameters
  kOracle,     // transport or protocol failure talking to a remote service
  kData,       // malformed or inconsistent input files
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& message) {
  return Error(ErrorKind::kConfig, message);
}
inline Error OracleError(const std::string& message) {
  return Error(ErrorKind::kOracle, message);
}
inline Error DataError(const std::string& message) {
  return Error(ErrorKind::kData, message);
}

}  // namespace codemix

#endif  // CODEMIX_ERROR_H_
