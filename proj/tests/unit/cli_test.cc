/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli/cli.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sdanet/data.h"
#include "sdanet/metrics.h"
#include "sdanet/model.h"

namespace sdanet::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "sdanet");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count_lines(const std::string& s, const std::string& prefix) {
  std::istringstream in(s);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sdanet_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_ / "data");
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  // Two small scenes in data/.
  void make_data() {
    for (int s = 0; s < 2; ++s)
      ASSERT_EQ(run({"synth", "--seed", std::to_string(s), "--height", "16", "--width", "16",
                     "--bands", "3", "--endmembers", "3", "--out",
                     path("data/s" + std::to_string(s) + ".hsi")})
                    .code,
                0);
  }

  std::vector<std::string> small_train_flags() {
    return {"--data-dir", path("data"), "--patch", "4", "--stride", "4", "--scale", "2",
            "--channels", "4", "--blocks", "1", "--batch", "4", "--val-fraction", "0.25",
            "--lr", "0.002"};
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthIsDeterministicAndMatchesLibrary) {
  ASSERT_EQ(run({"synth", "--seed", "5", "--height", "12", "--width", "10", "--bands", "4",
                 "--out", path("a.hsi")}).code, 0);
  Result r = run({"synth", "--seed", "5", "--height", "12", "--width", "10", "--bands", "4",
                  "--out", path("b.hsi")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(path("a.hsi")), slurp(path("b.hsi")));
  EXPECT_EQ(slurp(path("a.hsi")), cube_bytes(synth_scene(5, 12, 10, 4, 4)));
  HsiCube c = load_cube(path("a.hsi"));
  EXPECT_EQ(c.height, 12u);
  EXPECT_EQ(c.bands, 4u);
}

TEST_F(CliTest, SynthBadPathFails) {
  Result r = run({"synth", "--out", path("missing/dir/x.hsi")});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.rfind("error[io]: ", 0), 0u) << r.err;
}

TEST_F(CliTest, DegradeMatchesLibrary) {
  run({"synth", "--seed", "1", "--height", "16", "--width", "12", "--bands", "3",
       "--out", path("hr.hsi")});
  Result r = run({"degrade", "--in", path("hr.hsi"), "--scale", "4", "--out-lr", path("lr.hsi")});
  ASSERT_EQ(r.code, 0) << r.err;
  HsiCube hr = load_cube(path("hr.hsi"));
  EXPECT_EQ(slurp(path("lr.hsi")), cube_bytes(bicubic_resize(hr, 4, 3)));
  ASSERT_EQ(run({"degrade", "--in", path("hr.hsi"), "--scale", "1", "--out-lr",
                 path("same.hsi")}).code, 0);
  HsiCube same = load_cube(path("same.hsi"));
  for (std::size_t i = 0; i < hr.values.size(); ++i)
    EXPECT_NEAR(same.values[i], hr.values[i], 1e-6);
}

TEST_F(CliTest, ImportRaw) {
  HsiCube c = synth_scene(2, 4, 5, 2, 2);
  {
    std::ofstream out(path("x.raw"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(c.values.data()),
              static_cast<std::streamsize>(c.values.size() * 4));
  }
  ASSERT_EQ(run({"import-raw", "--in", path("x.raw"), "--height", "4", "--width", "5",
                 "--bands", "2", "--out", path("x.hsi")}).code, 0);
  EXPECT_EQ(load_cube(path("x.hsi")).values, c.values);
  EXPECT_EQ(load_cube(path("x.hsi")).name, "x");
}

TEST_F(CliTest, EvalBypassAndBicubic) {
  run({"synth", "--seed", "3", "--height", "16", "--width", "16", "--bands", "3",
       "--out", path("hr.hsi")});
  Result r = run({"eval", "--hr-cube", path("hr.hsi"), "--bypass"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "psnr=100.000000 ssim=1.000000 sam_deg=0.000000 cc=1.000000 ergas=0.000000 scale=4\n");
  Result b = run({"eval", "--hr-cube", path("hr.hsi"), "--bicubic", "--scale", "2", "--tsv"});
  ASSERT_EQ(b.code, 0) << b.err;
  HsiCube hr = load_cube(path("hr.hsi"));
  HsiCube up = bicubic_resize(bicubic_resize(hr, 8, 8), 16, 16);
  EXPECT_EQ(b.out, report_tsv_header() + "\n" + report_tsv_row(evaluate_all(up, hr, 2)) + "\n");
}

TEST_F(CliTest, EvalMissingCheckpointIsFormatError) {
  run({"synth", "--height", "8", "--width", "8", "--bands", "3", "--out", path("hr.hsi")});
  Result r = run({"eval", "--hr-cube", path("hr.hsi"), "--ckpt", path("none.ckpt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error[format]: ", 0), 0u) << r.err;
}

TEST_F(CliTest, TrainEchoesDefaultsAndRejectsZeroSteps) {
  make_data();
  auto flags = small_train_flags();
  std::vector<std::string> args{"train", "--data-dir", path("data"), "--patch", "4",
                                "--scale", "2", "--channels", "4", "--blocks", "1",
                                "--steps", "1"};
  Result r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("config batch=16 lr=0.0001 lambda=0.2 steps=1"), std::string::npos)
      << r.out;
  args.back() = "0";
  Result z = run(args);
  EXPECT_EQ(z.code, 1);
  EXPECT_EQ(z.err.rfind("error[config]: ", 0), 0u) << z.err;
}

TEST_F(CliTest, TrainIsDeterministicAndEvalMatchesLibrary) {
  make_data();
  auto flags = small_train_flags();
  flags.insert(flags.begin(), "train");
  auto a = flags, b = flags;
  for (auto* v : {&a, &b}) {
    v->push_back("--steps");
    v->push_back("3");
    v->push_back("--ckpt");
  }
  a.push_back(path("a.ckpt"));
  b.push_back(path("b.ckpt"));
  Result ra = run(a), rb = run(b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(slurp(path("a.ckpt")), slurp(path("b.ckpt")));
  EXPECT_EQ(count_lines(ra.out, "step="), 3u);
  EXPECT_EQ(count_lines(ra.out, "final psnr="), 1u);

  Result e = run({"eval", "--ckpt", path("a.ckpt"), "--hr-cube", path("data/s0.hsi"),
                  "--out-sr", path("sr.hsi")});
  ASSERT_EQ(e.code, 0) << e.err;
  SdanetModel m = load_checkpoint(path("a.ckpt"));
  HsiCube hr = load_cube(path("data/s0.hsi"));
  HsiCube sr = super_resolve(m, bicubic_resize(hr, 8, 8));
  EXPECT_EQ(e.out, format_report(evaluate_all(sr, hr, 2)) + "\n");
  EXPECT_TRUE(load_cube(path("sr.hsi")) == sr);

  Result wrong = run({"eval", "--ckpt", path("a.ckpt"), "--hr-cube", path("data/s0.hsi"),
                      "--variant", "no_dcsa"});
  EXPECT_EQ(wrong.err.rfind("error[format]: ", 0), 0u) << wrong.err;
}

TEST_F(CliTest, ConfigFileExplicitFlagsWin) {
  make_data();
  {
    std::ofstream cfg(path("t.cfg"));
    cfg << "# toy\nsteps = 2\nbatch=5\nlambda=0.1\nchannels=4\nblocks=1\nscale=2\npatch=4\n";
  }
  Result r = run({"train", "--config", path("t.cfg"), "--data-dir", path("data"), "--batch", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("config batch=3 lr=0.0001 lambda=0.1 steps=2"), std::string::npos)
      << r.out;
  {
    std::ofstream cfg(path("bad.cfg"));
    cfg << "bogus_key=1\n";
  }
  Result bad = run({"train", "--config", path("bad.cfg"), "--data-dir", path("data"),
                    "--steps", "1"});
  EXPECT_EQ(bad.err.rfind("error[config]: ", 0), 0u) << bad.err;
}

TEST_F(CliTest, DataDirFromEnvironment) {
  make_data();
  ::setenv(kDataDirEnv, path("data").c_str(), 1);
  Result r = run({"train", "--patch", "4", "--scale", "2", "--channels", "4", "--blocks", "1",
                  "--steps", "1"});
  ::unsetenv(kDataDirEnv);
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, AblateAndSweepRowCounts) {
  make_data();
  auto abl = small_train_flags();
  abl.insert(abl.begin(), "ablate");
  abl.insert(abl.end(), {"--steps", "1"});
  Result a = run(abl);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(count_lines(a.out, "variant="), 5u) << a.out;

  auto sw = small_train_flags();
  sw.insert(sw.begin(), "sweep");
  sw.insert(sw.end(), {"--steps", "1", "--lambdas", "0,0.2,0.5", "--tsv"});
  Result s = run(sw);
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(count_lines(s.out, "lambda\t"), 1u);
  EXPECT_EQ(count_lines(s.out, "0."), 3u) << s.out;
}

TEST_F(CliTest, GradcheckPasses) {
  Result r = run({"gradcheck"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(r.out, "module="), 4u);
  EXPECT_NE(r.out.find("status=pass"), std::string::npos) << r.out;
}

TEST_F(CliTest, UsageErrorsAndHelp) {
  Result none = run({});
  EXPECT_NE(none.code, 0);
  Result bad = run({"train", "--steps", "notanumber"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(bad.err.rfind("error[usage]: ", 0), 0u) << bad.err;
  Result unknown = run({"frobnicate"});
  EXPECT_EQ(unknown.code, 2);
  Result help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("synth"), std::string::npos);
  Result variant = run({"gradcheck", "--variant", "nope"});
  EXPECT_EQ(variant.code, 1);
  EXPECT_EQ(variant.err.rfind("error[config]: ", 0), 0u) << variant.err;
}

TEST_F(CliTest, LoadCubeDirSortsByName) {
  make_data();
  std::ofstream(path("data/ignored.txt")) << "x";
  auto cubes = load_cube_dir(path("data"));
  ASSERT_EQ(cubes.size(), 2u);
  EXPECT_EQ(cubes[0].name, "synth-0");
  EXPECT_THROW(load_cube_dir(path("nope")), IoError);
}

}  // namespace
}  // namespace sdanet::cli
