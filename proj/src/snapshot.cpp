#include "nematic/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nematic/errors.hpp"

namespace nematic {

namespace {

static_assert(sizeof(double) == 8);

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

void put_array(std::ostream& out, std::span<const double> a) {
  std::vector<char> buf(a.size() * 8);
  for (std::size_t n = 0; n < a.size(); ++n) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(a[n]));
    std::memcpy(buf.data() + 8 * n, &bits, 8);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

void get_array(std::istream& in, std::span<double> a) {
  std::vector<char> buf(a.size() * 8);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!in) throw FieldError("snapshot truncated");
  for (std::size_t n = 0; n < a.size(); ++n) {
    std::uint64_t bits;
    std::memcpy(&bits, buf.data() + 8 * n, 8);
    a[n] = std::bit_cast<double>(to_little(bits));
  }
}

} // namespace

void write_snapshot(std::ostream& out, const FlowState& s) {
  const Grid& g = s.grid();
  nlohmann::json h;
  h["format"] = "nematic-snapshot";
  h["version"] = 1;
  h["dim"] = g.dim();
  std::vector<int> cells;
  std::vector<double> length;
  for (int a = 0; a < g.dim(); ++a) {
    cells.push_back(g.cells(a));
    length.push_back(g.length(a));
  }
  h["cells"] = cells;
  h["length"] = length;
  h["boundary"] = to_string(g.boundary());
  h["time"] = s.t;
  h["step"] = s.step;
  const auto& ds = s.d.boundary_value();
  h["d_star"] = {ds[0], ds[1], ds[2]};
  h["pressure"] = "effective: p + lambda*|grad d|^2/2";
  nlohmann::json fields = nlohmann::json::array();
  fields.push_back({{"name", "rho"}, {"count", g.cell_count()}});
  for (int c = 0; c < g.dim(); ++c)
    fields.push_back({{"name", "u" + std::to_string(c)}, {"count", g.face_count(c)}});
  fields.push_back({{"name", "p"}, {"count", g.cell_count()}});
  for (int k = 0; k < 3; ++k)
    fields.push_back({{"name", "d" + std::to_string(k)}, {"count", g.cell_count()}});
  h["fields"] = fields;
  out << h.dump() << '\n';
  put_array(out, s.rho.values());
  for (int c = 0; c < g.dim(); ++c) put_array(out, s.u.component(c));
  put_array(out, s.p.values());
  for (int k = 0; k < 3; ++k) put_array(out, s.d.component(k));
}

void write_snapshot(const std::filesystem::path& path, const FlowState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open snapshot for writing: " + path.string());
  write_snapshot(out, s);
}

FlowState read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FieldError("snapshot missing header");
  const auto h = nlohmann::json::parse(line);
  if (h.value("format", "") != "nematic-snapshot") throw FieldError("not a nematic snapshot");
  const int dim = h.at("dim");
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  for (int a = 0; a < dim; ++a) {
    cells[a] = h.at("cells").at(a);
    length[a] = h.at("length").at(a);
  }
  const Grid g(dim, cells, length, boundary_from_string(h.at("boundary").get<std::string>()));
  const auto ds = h.at("d_star");
  FlowState s(g, {ds.at(0), ds.at(1), ds.at(2)});
  s.t = h.at("time");
  s.step = h.at("step");
  for (const auto& f : h.at("fields")) {
    const std::string name = f.at("name");
    const std::size_t count = f.at("count");
    std::span<double> dst;
    if (name == "rho") dst = s.rho.values();
    else if (name == "p") dst = s.p.values();
    else if (name.size() == 2 && name[0] == 'u') dst = s.u.component(name[1] - '0');
    else if (name.size() == 2 && name[0] == 'd') dst = s.d.component(name[1] - '0');
    else throw FieldError("unknown snapshot field " + name);
    if (dst.size() != count) throw FieldError("snapshot field " + name + " has wrong length");
    get_array(in, dst);
  }
  return s;
}

FlowState read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot: " + path.string());
  return read_snapshot(in);
}

} // namespace nematic
