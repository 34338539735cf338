#include "radloc/mapping/global_map.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

// Map file layout (all little-endian):
//   char[8]  magic "RADLOCMP"
//   u32      format version
//   f64      resolution
//   f64[3]   origin
//   u32      chunk side in cells
//   u64      chunk count
//   per chunk: i32 cx, i32 cy, u64 n, then n x (i32 x, i32 y, i32 z)

namespace radloc::mapping {
namespace {

constexpr char kMagic[8] = {'R', 'A', 'D', 'L', 'O', 'C', 'M', 'P'};

std::int32_t floor_div(std::int32_t a, std::int32_t b) {
  std::int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename T>
  void put(T v) {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    os_.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
  }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}
  template <typename T>
  T get() {
    std::array<unsigned char, sizeof(T)> b;
    if (!is_.read(reinterpret_cast<char*>(b.data()), sizeof(T))) throw std::runtime_error("map file truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
    T v;
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
  }

 private:
  std::istream& is_;
};

}  // namespace

GlobalMap::GlobalMap(double resolution, const Vec3& origin, int chunk_cells)
    : resolution_(resolution), origin_(origin), chunk_cells_(chunk_cells) {
  if (!(resolution > 0.0)) throw std::invalid_argument("map resolution must be positive");
  if (chunk_cells <= 0) throw std::invalid_argument("chunk side must be positive");
}

GlobalMap GlobalMap::from_grid(const OccupancyGrid& grid, int chunk_cells) {
  GlobalMap m(grid.params().resolution, grid.origin(), chunk_cells);
  for (const CellKey& k : grid.occupied_cells()) m.add_cell(k);
  return m;
}

void GlobalMap::add_cell(const CellKey& k) {
  std::vector<CellKey>& cells = chunks_[chunk_of(k)];
  const auto it = std::lower_bound(cells.begin(), cells.end(), k);
  if (it == cells.end() || *it != k) cells.insert(it, k);
}

ChunkKey GlobalMap::chunk_of(const CellKey& k) const {
  return {floor_div(k.x, chunk_cells_), floor_div(k.y, chunk_cells_)};
}

Eigen::Vector4d GlobalMap::chunk_bounds(const ChunkKey& c) const {
  const double s = chunk_side();
  return {origin_.x() + c.x * s, origin_.y() + c.y * s, origin_.x() + (c.x + 1) * s,
          origin_.y() + (c.y + 1) * s};
}

Vec3 GlobalMap::center(const CellKey& k) const {
  return origin_ + resolution_ * Vec3(k.x + 0.5, k.y + 0.5, k.z + 0.5);
}

std::vector<ChunkKey> GlobalMap::chunk_keys_near(const Eigen::Vector2d& pos, double radius) const {
  std::vector<ChunkKey> out;
  for (const auto& [c, cells] : chunks_) {
    const Eigen::Vector4d b = chunk_bounds(c);
    const double dx = std::max({b[0] - pos.x(), 0.0, pos.x() - b[2]});
    const double dy = std::max({b[1] - pos.y(), 0.0, pos.y() - b[3]});
    if (dx * dx + dy * dy <= radius * radius) out.push_back(c);
  }
  return out;
}

std::vector<Vec3> GlobalMap::chunks_near(const Eigen::Vector2d& pos, double radius) const {
  std::vector<Vec3> out;
  for (const ChunkKey& c : chunk_keys_near(pos, radius)) {
    for (const CellKey& k : chunks_.at(c)) out.push_back(center(k));
  }
  return out;
}

std::vector<Vec3> GlobalMap::all_points() const {
  std::vector<Vec3> out;
  for (const auto& [c, cells] : chunks_) {
    for (const CellKey& k : cells) out.push_back(center(k));
  }
  return out;
}

std::size_t GlobalMap::point_count() const {
  std::size_t n = 0;
  for (const auto& [c, cells] : chunks_) n += cells.size();
  return n;
}

bool GlobalMap::operator==(const GlobalMap& o) const {
  return resolution_ == o.resolution_ && origin_ == o.origin_ && chunk_cells_ == o.chunk_cells_ &&
         chunks_ == o.chunks_;
}

void GlobalMap::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  Writer w(os);
  w.put<std::uint32_t>(kFormatVersion);
  w.put<double>(resolution_);
  for (int i = 0; i < 3; ++i) w.put<double>(origin_[i]);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(chunk_cells_));
  w.put<std::uint64_t>(chunks_.size());
  for (const auto& [c, cells] : chunks_) {
    w.put<std::int32_t>(c.x);
    w.put<std::int32_t>(c.y);
    w.put<std::uint64_t>(cells.size());
    for (const CellKey& k : cells) {
      w.put<std::int32_t>(k.x);
      w.put<std::int32_t>(k.y);
      w.put<std::int32_t>(k.z);
    }
  }
  if (!os) throw std::runtime_error("failed writing " + path);

  nlohmann::ordered_json meta;
  meta["format_version"] = kFormatVersion;
  meta["resolution"] = resolution_;
  meta["origin"] = {origin_.x(), origin_.y(), origin_.z()};
  meta["chunk_side_cells"] = chunk_cells_;
  meta["chunk_side_m"] = chunk_side();
  meta["chunks"] = chunks_.size();
  meta["points"] = point_count();
  std::ofstream js(path + ".json");
  js << meta.dump(2) << "\n";
}

GlobalMap GlobalMap::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open map " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path + ": not a radloc map file");
  }
  Reader r(is);
  const auto version = r.get<std::uint32_t>();
  if (version != kFormatVersion) throw std::runtime_error(path + ": unsupported map version " + std::to_string(version));
  const double res = r.get<double>();
  Vec3 origin;
  for (int i = 0; i < 3; ++i) origin[i] = r.get<double>();
  const auto side = r.get<std::uint32_t>();
  if (!(res > 0.0) || side == 0 || side > (1u << 20)) throw std::runtime_error(path + ": bad map header");
  GlobalMap m(res, origin, static_cast<int>(side));
  const auto n_chunks = r.get<std::uint64_t>();
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    ChunkKey ck{r.get<std::int32_t>(), 0};
    ck.y = r.get<std::int32_t>();
    const auto n = r.get<std::uint64_t>();
    std::vector<CellKey>& cells = m.chunks_[ck];
    for (std::uint64_t i = 0; i < n; ++i) {
      CellKey k;
      k.x = r.get<std::int32_t>();
      k.y = r.get<std::int32_t>();
      k.z = r.get<std::int32_t>();
      if (m.chunk_of(k) != ck) throw std::runtime_error(path + ": cell outside its chunk");
      cells.push_back(k);
    }
    if (!std::is_sorted(cells.begin(), cells.end())) std::sort(cells.begin(), cells.end());
  }
  return m;
}

}  // namespace radloc::mapping
