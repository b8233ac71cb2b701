// phrasekit/common.hpp

// Copyright 2026  The PhraseKit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHRASEKIT_COMMON_HPP
#define PHRASEKIT_COMMON_HPP

#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pk {

// All library errors carry a short machine-checkable tag ("wav-multichannel",
// "dim-mismatch", ...) plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& msg)
      : std::runtime_error("[" + tag + "] " + msg), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

}  // namespace pk

#define PK_CHECK(cond, tag, msg)                 \
  do {                                           \
    if (!(cond)) {                               \
      std::ostringstream pk_oss__;               \
      pk_oss__ << msg;                           \
      throw ::pk::Error((tag), pk_oss__.str());  \
    }                                            \
  } while (0)

#define PK_ERR(tag, msg)                         \
  do {                                           \
    std::ostringstream pk_oss__;                 \
    pk_oss__ << msg;                             \
    throw ::pk::Error((tag), pk_oss__.str());    \
  } while (0)

#define PK_WARN(msg)                                      \
  do {                                                    \
    std::cerr << "WARNING (phrasekit): " << msg << "\n";  \
  } while (0)

#define PK_LOG(msg)                                   \
  do {                                                \
    std::cerr << "LOG (phrasekit): " << msg << "\n";  \
  } while (0)

#endif  // PHRASEKIT_COMMON_HPP
