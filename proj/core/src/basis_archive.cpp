#include "epsrb/basis_archive.hpp"

#include "epsrb/error.hpp"
#include "epsrb/hash.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>

namespace epsrb {

namespace {

constexpr std::string_view kMagic = "EPSRB-BASIS/1";

void put_f64(std::string& out, double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffU));
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

StopReason parse_stop(const std::string& s) {
  if (s == "converged") return StopReason::Converged;
  if (s == "stagnated") return StopReason::Stagnated;
  if (s == "saturated") return StopReason::Saturated;
  raise(ErrorCode::ConfigParse, "unknown stop_reason '" + s + "' in basis archive");
}

}  // namespace

void save_basis(const std::filesystem::path& path, const ReducedBasis& basis,
                const ProblemFamily& family, std::string_view training_json) {
  const Index dim = family.codomain().dim();
  const auto m = static_cast<Index>(basis.size());
  if (basis.ortho.cols() != m || (m > 0 && basis.ortho.rows() != dim)) {
    raise(ErrorCode::DimensionMismatch, "basis does not match the family codomain");
  }

  nlohmann::json meta;
  meta["format"] = "epsrb-basis";
  meta["version"] = 1;
  meta["gram_x_hash"] = to_hex(family.domain().gram_hash());
  meta["gram_y_hash"] = to_hex(family.codomain().gram_hash());
  meta["family_fingerprint"] = to_hex(family.fingerprint());
  meta["eps"] = family.eps();
  meta["dim"] = dim;
  meta["m"] = m;
  meta["delta"] = basis.delta;
  meta["stop_reason"] = std::string(to_string(basis.stop_reason));
  meta["history"] = basis.history;
  auto& sel = meta["selected"] = nlohmann::json::array();
  for (const auto& s : basis.selected) {
    sel.push_back({{"nu", s.nu}, {"eta", s.eta}, {"nu_index", s.nu_index}, {"eta_index", s.eta_index}});
  }
  meta["payload"] = {{"dtype", "float64"},
                     {"byte_order", "little-endian"},
                     {"layout", "row-major"},
                     {"blocks", {{{"name", "snapshots"}, {"rows", m}, {"cols", dim}},
                                 {{"name", "ortho"}, {"rows", m}, {"cols", dim}}}},
                     {"bytes", 2 * m * dim * 8}};
  try {
    meta["training"] = nlohmann::json::parse(training_json);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::InvalidArgument, std::string("training metadata is not JSON: ") + e.what());
  }

  std::string payload;
  payload.reserve(static_cast<std::size_t>(2 * m * dim * 8));
  for (const auto& w : basis.snapshots) {
    for (Index k = 0; k < dim; ++k) put_f64(payload, w(k));
  }
  for (Index c = 0; c < m; ++c) {
    for (Index k = 0; k < dim; ++k) put_f64(payload, basis.ortho(k, c));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << kMagic << '\n' << meta.dump() << '\n';
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) raise(ErrorCode::Io, "write failed for " + path.string());
}

LoadedBasis load_basis(const std::filesystem::path& path, const ProblemFamily& family) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open " + path.string());
  std::string magic, header;
  std::getline(in, magic);
  if (magic != kMagic) raise(ErrorCode::ConfigParse, path.string() + " is not a basis archive");
  std::getline(in, header);
  const std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigParse, std::string("archive metadata: ") + e.what());
  }

  LoadedBasis out;
  try {
    const auto check = [&](const char* key, std::uint64_t expected) {
      if (meta.at(key).get<std::string>() != to_hex(expected)) {
        raise(ErrorCode::HashMismatch, std::string(key) + " of " + path.string() +
                                           " does not match the configured family");
      }
    };
    check("gram_x_hash", family.domain().gram_hash());
    check("gram_y_hash", family.codomain().gram_hash());
    check("family_fingerprint", family.fingerprint());

    const Index dim = meta.at("dim").get<Index>();
    const Index m = meta.at("m").get<Index>();
    if (dim != family.codomain().dim()) raise(ErrorCode::HashMismatch, "archive dimension differs");
    if (payload.size() != static_cast<std::size_t>(2 * m * dim * 8)) {
      raise(ErrorCode::ConfigParse, "archive payload has " + std::to_string(payload.size()) +
                                        " bytes, expected " + std::to_string(2 * m * dim * 8));
    }

    ReducedBasis& b = out.basis;
    b.delta = meta.at("delta").get<double>();
    b.stop_reason = parse_stop(meta.at("stop_reason").get<std::string>());
    b.history = meta.at("history").get<std::vector<double>>();
    for (const auto& s : meta.at("selected")) {
      b.selected.push_back({s.at("nu").get<Parameter>(), s.at("eta").get<double>(),
                            s.at("nu_index").get<std::size_t>(), s.at("eta_index").get<std::size_t>()});
    }
    if (static_cast<Index>(b.selected.size()) != m) raise(ErrorCode::ConfigParse, "selected/m mismatch");

    const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
    for (Index i = 0; i < m; ++i) {
      Vector w(dim);
      for (Index k = 0; k < dim; ++k, p += 8) w(k) = get_f64(p);
      b.snapshots.push_back(std::move(w));
    }
    b.ortho.resize(dim, m);
    for (Index c = 0; c < m; ++c) {
      for (Index k = 0; k < dim; ++k, p += 8) b.ortho(k, c) = get_f64(p);
    }
    out.training_json = meta.contains("training") ? meta["training"].dump() : "{}";
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorCode::ConfigParse, std::string("archive metadata: ") + e.what());
  }
  return out;
}

}  // namespace epsrb
