#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <random>
#include <sstream>

#include "ssn/model_file.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

ssn::Model sample_model() {
  return {ssn::Task::Svr, {0.1, -2.5e-300, 1.0 / 3.0, 12345.678}, true, 0.037, 0.01};
}

std::string serialized(const ssn::Model& m) {
  std::ostringstream out;
  ssn::write_model(out, m);
  return out.str();
}

}  // namespace

TEST(ModelFile, HeaderLayout) {
  const std::string s = serialized(sample_model());
  EXPECT_EQ(s.rfind("task svr\nn 4\nbias_appended 1\nC 0.036999999999999998\n", 0), 0u);
  EXPECT_NE(s.find("\nepsilon 0.01"), std::string::npos);
  EXPECT_NE(s.find("\n0.33333333333333331\n"), std::string::npos);
}

TEST(ModelFile, StreamRoundTripIsBitwise) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 100; ++t) {
    ssn::Model m;
    m.task = t % 2 ? ssn::Task::Svc : ssn::Task::Svr;
    m.omega = ssn_test::random_vector(rng, 1 + rng() % 40, -1e3, 1e3);
    for (auto& v : m.omega) v = std::ldexp(v, static_cast<int>(rng() % 400) - 200);
    m.bias_appended = t % 3 == 0;
    m.C = std::ldexp(1.0 + static_cast<double>(rng() % 1000), -static_cast<int>(rng() % 30));
    m.epsilon = m.task == ssn::Task::Svr ? 0.01 : 0.0;
    std::istringstream in(serialized(m));
    ssn::Model back = ssn::read_model(in);
    ASSERT_EQ(back.omega.size(), m.omega.size());
    EXPECT_EQ(std::memcmp(back.omega.data(), m.omega.data(), m.omega.size() * sizeof(double)), 0);
    EXPECT_EQ(back, m);
  }
}

TEST(ModelFile, SaveLoadFile) {
  const fs::path dir = fs::temp_directory_path() / "ssn_model_file_test";
  fs::create_directories(dir);
  const std::string path = (dir / "m.model").string();
  ssn::save_model(path, sample_model());
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  EXPECT_EQ(ssn::load_model(path), sample_model());
  fs::remove_all(dir);
}

TEST(ModelFile, SaveIntoMissingDirectoryFails) {
  const std::string path = "/nonexistent-dir-for-ssn/m.model";
  EXPECT_THROW(ssn::save_model(path, sample_model()), ssn::IoError);
  EXPECT_FALSE(fs::exists(path));
}

TEST(ModelFile, LoadMissingFileIsIoError) {
  EXPECT_THROW(ssn::load_model("/nonexistent/m.model"), ssn::IoError);
}

TEST(ModelFile, RejectsMalformed) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(ssn::read_model(in), ssn::ParseError) << text;
  };
  bad("");
  bad("task foo\nn 1\nbias_appended 0\nC 1\nepsilon 0\n1\n");
  bad("task svc\nn x\nbias_appended 0\nC 1\nepsilon 0\n1\n");
  bad("task svc\nn 1\nbias_appended 2\nC 1\nepsilon 0\n1\n");
  bad("task svc\nn 2\nbias_appended 0\nC 1\nepsilon 0\n1\n");         // too few
  bad("task svc\nn 1\nbias_appended 0\nC 1\nepsilon 0\n1\n2\n");      // too many
  bad("task svc\nn 1\nbias_appended 0\nC one\nepsilon 0\n1\n");
  bad("task svc\nn 1\nC 1\nbias_appended 0\nepsilon 0\n1\n");         // order
  bad("task svc\nn 0\nbias_appended 1\nC 1\nepsilon 0\n");
}

TEST(ModelFile, RawFeatures) {
  EXPECT_EQ(sample_model().raw_features(), 3u);
  ssn::Model m = sample_model();
  m.bias_appended = false;
  EXPECT_EQ(m.raw_features(), 4u);
}
