//
// Copyright 2026 The rllow Authors
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
//

// File formats: instances and kernels as JSON, datasets as CSV, reports as
// JSON. Numbers are written with round-trip precision, so doubles survive a
// write/read cycle bit-exactly. Every parse failure is a ValidationError.

#ifndef RLLOW_IO_HPP_
#define RLLOW_IO_HPP_

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "rllow/analysis.hpp"
#include "rllow/dp_estimator.hpp"
#include "rllow/estimator.hpp"
#include "rllow/instance.hpp"
#include "rllow/mdp.hpp"

namespace rllow {

using Json = nlohmann::json;

// {"S","A","d","features": S x A x d,"theta","rho","schedule": [[k,i,j,N],...],"L"}
Json instance_to_json(const Instance& v);
// Shape-checked and validated.
Instance instance_from_json(const Json& j);

// {"P": S x A x S}
Json kernel_to_json(const TransitionKernel& kernel);
TransitionKernel kernel_from_json(const Json& j);

// {"rhat": S x A, "selections": [...], "tie_sets": [[...], ...]} plus
// {"privacy": {"epsilon","delta"}} for private runs.
Json report_to_json(const EstimateReport& report,
                    const std::optional<PrivacyParams>& privacy = std::nullopt);

Json hardness_to_json(const HardnessReport& report);

// CSV with header state,first,second,winner_is_first and 0-based indices.
void write_dataset(std::ostream& out, const PreferenceDataset& data);
PreferenceDataset read_dataset(std::istream& in);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& v);
TransitionKernel read_kernel(const std::string& path);
PreferenceDataset read_dataset_file(const std::string& path);
void write_dataset_file(const std::string& path, const PreferenceDataset& data);

}  // namespace rllow

#endif  // RLLOW_IO_HPP_
