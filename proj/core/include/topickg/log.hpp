// Copyright 2026 The topickg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string_view>

namespace topickg {

// Non-fatal conditions (zero H columns, nodes that cannot be expanded, ...)
// are reported here. The default sink writes "warning: <msg>" to stderr.
using WarningSink = std::function<void(std::string_view)>;

void log_warning(std::string_view message);
// Returns the previous sink. Pass nullptr to restore the default.
WarningSink set_warning_sink(WarningSink sink);

}  // namespace topickg
