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

#include <cstdio>
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rllow/io.hpp"

namespace rllow {
namespace {

TEST(InstanceJson, RoundTripIsBitExact) {
  Engine rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Instance v = testing::random_consistent_instance(rng);
    const Instance back = instance_from_json(Json::parse(instance_to_json(v).dump()));
    EXPECT_EQ(back, v);
  }
  GeneratorConfig cfg;
  cfg.seed = 99;
  const Instance p = make_benchmark_instance(cfg);
  EXPECT_EQ(instance_from_json(Json::parse(instance_to_json(p).dump(2))), p);
}

TEST(InstanceJson, Layout) {
  const Json j = instance_to_json(testing::t2());
  EXPECT_EQ(j.at("S"), 2);
  EXPECT_EQ(j.at("A"), 2);
  EXPECT_EQ(j.at("d"), 1);
  EXPECT_EQ(j.at("features")[1][0][0], 1.0);
  EXPECT_EQ(j.at("schedule")[1], (Json::array({1, 0, 1, 0.8})));
  EXPECT_EQ(j.at("L"), 1.0);
}

TEST(InstanceJson, RejectsMalformedInput) {
  Json j = instance_to_json(testing::t1());
  Json bad = j;
  bad["features"] = Json::array({Json::array({Json::array({1.0})})});
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad.erase("theta");
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad["schedule"] = Json::array({Json::array({0, 1, 0, 1.0})});
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad["rho"] = Json::array({0.5});
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  bad = j;
  bad["L"] = "one";
  EXPECT_THROW(instance_from_json(bad), ValidationError);
  EXPECT_THROW(instance_from_json(Json::array()), ValidationError);
}

TEST(KernelJson, RoundTripAndValidation) {
  const TransitionKernel k = state_independent_kernel(3, std::vector<double>{0.1, 0.2, 0.7});
  const TransitionKernel back = kernel_from_json(Json::parse(kernel_to_json(k).dump()));
  EXPECT_EQ(back.num_states, 3);
  EXPECT_EQ(back.num_actions, 3);
  EXPECT_EQ(back.probs, k.probs);
  EXPECT_THROW(kernel_from_json(Json{{"P", Json::array({Json::array({Json::array({0.5})})})}}),
               ValidationError);
  EXPECT_THROW(kernel_from_json(Json{{"Q", 1}}), ValidationError);
}

TEST(DatasetCsv, RoundTrip) {
  const PreferenceDataset data = sample_dataset(testing::t2(), 37, 4);
  std::stringstream buf;
  write_dataset(buf, data);
  std::string header;
  std::getline(std::stringstream(buf.str()), header);
  EXPECT_EQ(header, "state,first,second,winner_is_first");
  EXPECT_EQ(read_dataset(buf), data);
}

TEST(DatasetCsv, RejectsMalformedRows) {
  for (const char* text : {"state,first,second,winner_is_first\n0,0\n",
                           "state,first,second,winner_is_first\n0,0,1,2\n",
                           "state,first,second,winner_is_first\n0,x,1,1\n", "nope\n"}) {
    std::stringstream in(text);
    EXPECT_THROW(read_dataset(in), ValidationError) << text;
  }
}

TEST(ReportJson, CarriesPrivacyWhenGiven) {
  const PreferenceDataset data = sample_dataset(testing::t1(), 20, 1);
  const EstimateReport r = rl_low(data, testing::t1().features, 1.0, 3);
  const Json plain = report_to_json(r);
  EXPECT_FALSE(plain.contains("privacy"));
  EXPECT_EQ(plain.at("rhat")[0][0], 0.0);
  EXPECT_EQ(plain.at("selections").size(), 1u);
  const Json priv = report_to_json(r, PrivacyParams{0.5, 0.1});
  EXPECT_EQ(priv.at("privacy").at("epsilon"), 0.5);
  EXPECT_EQ(priv.at("privacy").at("delta"), 0.1);
}

TEST(Files, WriteAndReadBack) {
  const auto dir = std::filesystem::temp_directory_path() / "rllow_io_test";
  std::filesystem::create_directories(dir);
  const std::string inst = (dir / "v.json").string(), data = (dir / "d.csv").string();
  const Instance v = make_benchmark_instance({});
  write_instance(inst, v);
  EXPECT_EQ(read_instance(inst), v);
  const PreferenceDataset d = sample_dataset(v, 10, 0);
  write_dataset_file(data, d);
  EXPECT_EQ(read_dataset_file(data), d);
  EXPECT_THROW(read_instance((dir / "missing.json").string()), ValidationError);
  write_text_file((dir / "broken.json").string(), "{ not json");
  EXPECT_THROW(read_instance((dir / "broken.json").string()), ValidationError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace rllow
