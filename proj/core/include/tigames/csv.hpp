// Copyright 2026 The tigames Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tigames {

/// Header row plus numeric rows, every value printed with %.12g.
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Whitespace-separated columns without a header, for plotting tools.
void write_plot_data(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tigames
