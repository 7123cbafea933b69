/*
 * Copyright (c) The webbot Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

namespace webbot {

/// Quotes a field per RFC 4180 when it contains a comma, quote or newline.
std::string csv_field(const std::string& value);

/// Splits one CSV record, honouring quoted fields.
std::vector<std::string> parse_csv_row(const std::string& line);

/// printf-style fixed-point formatting.
std::string format_fixed(double value, int decimals);

}  // namespace webbot
