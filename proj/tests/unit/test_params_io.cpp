#include <cmath>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hybridom/error.hpp"
#include "hybridom/params_io.hpp"

using namespace hybridom;

namespace {

std::string error_of(const std::string& text) {
  try {
    resolve(parse_document(text, "test.params"));
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

std::string with_line(std::string_view key, std::string_view replacement) {
  std::string out;
  std::istringstream in{std::string(paper_defaults_text())};
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    std::string k = eq == std::string::npos ? "" : line.substr(0, eq);
    while (!k.empty() && k.back() == ' ') k.pop_back();
    out += (k == key ? std::string(replacement) : line) + "\n";
  }
  return out;
}

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

}  // namespace

TEST(ParamsIo, PresetMatchesBuiltInDefaults) {
  const ParsedParams pp = parse_params("paper_defaults");
  const SystemParams ref = SystemParams::paper_defaults();
  EXPECT_DOUBLE_EQ(pp.params.kappa, ref.kappa);
  EXPECT_DOUBLE_EQ(pp.params.kappa, kTwoPi * 1.3e6);
  EXPECT_DOUBLE_EQ(pp.params.omega_r, 23.7e3);
  EXPECT_DOUBLE_EQ(pp.params.omega_m, 1e5);
  EXPECT_DOUBLE_EQ(pp.params.omega_sw, 0.2 * 23.7e3);
  EXPECT_DOUBLE_EQ(pp.params.eta, 100.0 * pp.params.kappa);
  EXPECT_DOUBLE_EQ(pp.params.delta_c, -15.0 * pp.params.kappa);
  EXPECT_DOUBLE_EQ(pp.params.phase_noise.gamma_tilde, 0.5 * kTwoPi * 140e3);
  EXPECT_DOUBLE_EQ(pp.params.delta_a, ref.delta_a);
  EXPECT_EQ(pp.params.n_atoms, ref.n_atoms);
  EXPECT_FALSE(pp.overrides.xi_m.has_value());
  const DerivedModel m = derive(pp.params);
  EXPECT_NEAR(m.omega_c / pp.params.omega_m, 1.0, 0.01);
}

TEST(ParamsIo, EmptyFileListsEveryMissingKey) {
  const std::string err = error_of("# nothing\n");
  for (const char* key : {"kappa", "g0", "Delta_a", "omega_R", "omega_m", "eta", "delta_c_detuning",
                          "Gamma_l", "omega_N", "gamma_tilde", "N_atoms", "mirror_mass", "temperature"}) {
    EXPECT_NE(err.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(err.find("n_ph"), std::string::npos);
  EXPECT_EQ(err.find("xi_m"), std::string::npos);
}

TEST(ParamsIo, UnknownKeyCarriesLineNumber) {
  const std::string text = std::string(paper_defaults_text()) + "kapa = 1 MHz\n";
  const int line = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  const std::string err = error_of(text);
  EXPECT_NE(err.find("test.params:" + std::to_string(line) + ": kapa: unknown key"), std::string::npos) << err;
}

TEST(ParamsIo, BareNumberNeedsUnitFlag) {
  const std::string err = error_of(with_line("omega_R_is_angular", "# removed"));
  EXPECT_NE(err.find("omega_R: bare number needs omega_R_is_angular"), std::string::npos) << err;
  const std::string hz = with_line("omega_R_is_angular", "omega_R_is_angular = false");
  EXPECT_DOUBLE_EQ(resolve(parse_document(hz)).params.omega_r, kTwoPi * 23.7e3);
  EXPECT_NE(error_of(with_line("omega_R_is_angular", "omega_R_is_angular = maybe")).find("expected true or false"),
            std::string::npos);
}

TEST(ParamsIo, UnitsAndReferences) {
  ParamDocument doc = paper_defaults_document();
  apply_overrides(doc, {"gamma_m = 2 kHz", "omega_N = 3e5 rad/s", "Gamma_l = 0.01 * omega_N",
                        "omega_sw = 1 GHz", "eta=12.5 kappa"});
  const SystemParams p = resolve(doc).params;
  EXPECT_DOUBLE_EQ(p.gamma_m, kTwoPi * 2e3);
  EXPECT_DOUBLE_EQ(p.phase_noise.omega_n, 3e5);
  EXPECT_DOUBLE_EQ(p.phase_noise.linewidth, 3e3);
  EXPECT_DOUBLE_EQ(p.phase_noise.gamma_tilde, 1.5e5);  // still 0.5 omega_N
  EXPECT_DOUBLE_EQ(p.omega_sw, kTwoPi * 1e9);
  EXPECT_DOUBLE_EQ(p.eta, 12.5 * p.kappa);
}

TEST(ParamsIo, CircularAndDanglingReferences) {
  ParamDocument doc = paper_defaults_document();
  apply_overrides(doc, {"omega_N = 2 gamma_tilde"});
  std::string err;
  try {
    resolve(doc);
  } catch (const ValidationError& e) {
    err = e.what();
  }
  EXPECT_NE(err.find("circular reference"), std::string::npos) << err;
  EXPECT_NE(error_of(with_line("eta", "eta = 3 furlongs")).find("unknown unit or reference 'furlongs'"),
            std::string::npos);
  EXPECT_NE(error_of(with_line("eta", "eta = 3 xi_m")).find("references missing key 'xi_m'"), std::string::npos);
}

TEST(ParamsIo, OverridesReplaceFileValues) {
  ParamDocument doc = paper_defaults_document();
  apply_overrides(doc, {"eta = 30 kappa", "eta = 40 kappa", "xi_c = 0.2 kappa"});
  const ParsedParams pp = resolve(doc);
  EXPECT_DOUBLE_EQ(pp.params.eta, 40.0 * pp.params.kappa);
  ASSERT_TRUE(pp.overrides.xi_c.has_value());
  DerivedModel m = derive(pp.params);
  pp.overrides.apply(m);
  EXPECT_DOUBLE_EQ(m.xi_c, 0.2 * pp.params.kappa);
  EXPECT_THROW(apply_overrides(doc, {"no equals sign"}), ValidationError);
  EXPECT_THROW(apply_overrides(doc, {"= 3 kHz"}), ValidationError);
}

TEST(ParamsIo, DuplicateKeyAndMalformedLines) {
  try {
    parse_document("kappa = 1 MHz\ng0 = 1 MHz\nkappa = 2 MHz\njunk line\n", "dup.params");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string err = e.what();
    EXPECT_NE(err.find("dup.params:3: kappa: duplicate key (first set on line 1)"), std::string::npos) << err;
    EXPECT_NE(err.find("dup.params:4: expected 'key = value'"), std::string::npos) << err;
  }
}

TEST(ParamsIo, AtomNumberMustBeAPositiveInteger) {
  EXPECT_NE(error_of(with_line("N_atoms", "N_atoms = 1500.5")).find("must be a positive integer"), std::string::npos);
  EXPECT_NE(error_of(with_line("N_atoms", "N_atoms = -4")).find("must be a positive integer"), std::string::npos);
  EXPECT_EQ(resolve(parse_document(with_line("N_atoms", "N_atoms = 2e4"))).params.n_atoms, 20000);
}

TEST(ParamsIo, PhysicalValidationIsReported) {
  const std::string err = error_of(with_line("kappa", "kappa = -1 MHz"));
  EXPECT_NE(err.find("kappa"), std::string::npos) << err;
}

TEST(ParamsIo, SerializationRoundTrips) {
  ParamDocument doc = paper_defaults_document();
  apply_overrides(doc, {"xi_m = 0.05 kappa", "n_ph = 0.25", "temperature = 1.7e-7"});
  const ParsedParams first = resolve(doc);
  const std::string text = serialize_params(first);
  const ParsedParams second = resolve(parse_document(text, "round-trip"));
  EXPECT_EQ(serialize_params(second), text);
  EXPECT_EQ(second.params.kappa, first.params.kappa);
  EXPECT_EQ(second.params.phase_noise.gamma_tilde, first.params.phase_noise.gamma_tilde);
  EXPECT_EQ(second.params.n_ph, 0.25);
  EXPECT_EQ(*second.overrides.xi_m, *first.overrides.xi_m);
  EXPECT_FALSE(second.overrides.xi_c.has_value());
  EXPECT_NE(text.find("kappa_is_angular = true"), std::string::npos);
}

TEST(ParamsIo, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "hybridom_test.params";
  {
    std::ofstream out(path);
    out << with_line("eta", "eta = 55 kappa   # trailing comment");
  }
  const ParsedParams pp = parse_params(path);
  EXPECT_DOUBLE_EQ(pp.params.eta, 55.0 * pp.params.kappa);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_params(path), ValidationError);
}

TEST(ParamsIo, FrequencyLiterals) {
  const SystemParams ctx = SystemParams::paper_defaults();
  EXPECT_DOUBLE_EQ(parse_frequency("10 kHz", ctx), kTwoPi * 1e4);
  EXPECT_DOUBLE_EQ(parse_frequency("1kHz", ctx), kTwoPi * 1e3);
  EXPECT_DOUBLE_EQ(parse_frequency("5 rad/s", ctx), 5.0);
  EXPECT_DOUBLE_EQ(parse_frequency("0.5 omega_R", ctx), 0.5 * ctx.omega_r);
  EXPECT_DOUBLE_EQ(parse_frequency("2*kappa", ctx), 2.0 * ctx.kappa);
  EXPECT_THROW(parse_frequency("12", ctx), ValidationError);
  EXPECT_THROW(parse_frequency("12 parsecs", ctx), ValidationError);
  EXPECT_THROW(parse_frequency("kHz", ctx), ValidationError);
}
