#include "mmrb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <sstream>

namespace mmrb {

namespace {

constexpr char kSnapshotMagic[6] = "MMRB1";

void put_i64(std::ostream& os, int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }

int64_t get_i64(std::istream& is) {
  int64_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  if (!is) throw Error("snapshot file: truncated header");
  return v;
}

} // namespace

FileSnapshotSink::FileSnapshotSink(const std::string& path, int n_dof, int n_v, int n_steps)
    : os_(path, std::ios::binary) {
  if (!os_) throw Error("cannot open for writing: " + path);
  os_.write(kSnapshotMagic, 5);
  put_i64(os_, n_dof);
  put_i64(os_, n_v);
  put_i64(os_, n_steps);
}

void FileSnapshotSink::on_level(int, const Vector& rho, const Matrix& g) {
  os_.write(reinterpret_cast<const char*>(rho.data()),
            static_cast<std::streamsize>(sizeof(double) * rho.size()));
  os_.write(reinterpret_cast<const char*>(g.data()),
            static_cast<std::streamsize>(sizeof(double) * g.size()));
  if (!os_) throw Error("snapshot file: write failed");
}

SnapshotReader::SnapshotReader(const std::string& path) : is_(path, std::ios::binary) {
  if (!is_) throw Error("cannot open for reading: " + path);
  char magic[5];
  is_.read(magic, 5);
  if (!is_ || std::memcmp(magic, kSnapshotMagic, 5) != 0)
    throw Error("snapshot file: bad magic header");
  n_dof_ = static_cast<int>(get_i64(is_));
  n_v_ = static_cast<int>(get_i64(is_));
  n_steps_ = static_cast<int>(get_i64(is_));
}

bool SnapshotReader::next(Vector& rho, Matrix& g) {
  if (read_ > n_steps_) return false;
  rho.resize(n_dof_);
  g.resize(n_dof_, n_v_);
  is_.read(reinterpret_cast<char*>(rho.data()),
           static_cast<std::streamsize>(sizeof(double) * rho.size()));
  is_.read(reinterpret_cast<char*>(g.data()),
           static_cast<std::streamsize>(sizeof(double) * g.size()));
  if (!is_) throw Error("snapshot file: truncated level");
  ++read_;
  return true;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open for writing: " + path);
  os << std::setprecision(17);
  return os;
}

} // namespace

void write_greedy_report_csv(const std::string& path, const GreedyReport& report) {
  auto os = open_out(path);
  os << "iter,r_rho,r_g,nv_rq,ratio_rho,ratio_g,est_rho,est_f,wall_ms\n";
  for (const auto& r : report.rows)
    os << r.iter << ',' << r.r_rho << ',' << r.r_g << ',' << r.nv_rq << ',' << r.ratio_rho
       << ',' << r.ratio_g << ',' << r.est_rho << ',' << r.est_f << ',' << r.wall_ms << '\n';
}

void write_metrics_csv(const std::string& path, const RunMetrics& m) {
  auto os = open_out(path);
  os << "e_rho,r_rho,e_vf,r_vf,e_f,r_f,compression_ratio,"
        "wall_offline_ms,wall_online_ms,wall_reference_ms,wall_predict_ms\n";
  os << m.e_rho << ',' << m.r_rho << ',' << m.e_vf << ',' << m.r_vf << ',' << m.e_f << ','
     << m.r_f << ',' << m.compression_ratio << ',' << m.wall_offline_ms << ','
     << m.wall_online_ms << ',' << m.wall_reference_ms << ',' << m.wall_predict_ms << '\n';
}

void write_error_series_csv(const std::string& path, const std::vector<ErrorSeriesRow>& rows) {
  auto os = open_out(path);
  os << "t,err_rho,err_vf,err_f\n";
  for (const auto& r : rows)
    os << r.t << ',' << r.err_rho << ',' << r.err_vf << ',' << r.err_f << '\n';
}

void write_node_list_csv(const std::string& path, const AngularQuadrature& quad,
                         int n_initial_nodes) {
  auto os = open_out(path);
  os << "vx,vy,vz,weight,origin\n";
  for (int k = 0; k < quad.size(); ++k)
    os << quad.nodes[k].x << ',' << quad.nodes[k].y << ',' << quad.nodes[k].z << ','
       << quad.weights[k] << ',' << (k < n_initial_nodes ? "initial" : "greedy") << '\n';
}

void write_grid_csv(const std::string& path, const SpatialMesh& mesh, const Vector& field) {
  auto os = open_out(path);
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      if (i) os << ',';
      os << field[mesh.index(i, j)];
    }
    os << '\n';
  }
}

namespace {

// five-stop viridis-like ramp
void color_ramp(double t, int& r, int& g, int& b) {
  static const int stops[5][3] = {
      {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int lo = std::min(3, static_cast<int>(t));
  const double f = t - lo;
  r = static_cast<int>(std::lround(stops[lo][0] + f * (stops[lo + 1][0] - stops[lo][0])));
  g = static_cast<int>(std::lround(stops[lo][1] + f * (stops[lo + 1][1] - stops[lo][1])));
  b = static_cast<int>(std::lround(stops[lo][2] + f * (stops[lo + 1][2] - stops[lo][2])));
}

} // namespace

void write_grid_svg(const std::string& path, const SpatialMesh& mesh, const Vector& field) {
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;
  const int cell_px = std::max(2, 512 / std::max(mesh.nx, mesh.ny));
  const int w = cell_px * mesh.nx, h = cell_px * mesh.ny;

  auto os = open_out(path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      int r, g, b;
      color_ramp((field[mesh.index(i, j)] - lo) / span, r, g, b);
      // y axis points up in physical coordinates
      os << "<rect x=\"" << i * cell_px << "\" y=\"" << (mesh.ny - 1 - j) * cell_px
         << "\" width=\"" << cell_px << "\" height=\"" << cell_px << "\" fill=\"rgb(" << r
         << ',' << g << ',' << b << ")\"/>\n";
    }
  }
  os << "</svg>\n";
}

void write_rho_history_csv(const std::string& path, const std::vector<Vector>& levels,
                           double dt) {
  auto os = open_out(path);
  os << "n,t,values...\n";
  for (size_t n = 0; n < levels.size(); ++n) {
    os << n << ',' << static_cast<double>(n) * dt;
    for (int i = 0; i < levels[n].size(); ++i) os << ',' << levels[n][i];
    os << '\n';
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream is(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(line_no) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    cfg[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

std::string emit_config(const Config& cfg) {
  // group by section first so sectionless keys always lead
  std::map<std::string, std::map<std::string, std::string>> grouped;
  for (const auto& [full_key, value] : cfg) {
    const auto dot = full_key.find('.');
    const std::string section = dot == std::string::npos ? "" : full_key.substr(0, dot);
    const std::string key = dot == std::string::npos ? full_key : full_key.substr(dot + 1);
    grouped[section][key] = value;
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [section, entries] : grouped) {
    if (!first) os << '\n';
    first = false;
    if (!section.empty()) os << '[' << section << "]\n";
    for (const auto& [key, value] : entries) os << key << " = " << value << '\n';
  }
  return os.str();
}

Config load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string file_content_hash(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for hashing: " + path);
  uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (is) {
    is.read(buf, sizeof(buf));
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_manifest(const std::string& dir, const std::vector<std::string>& relative_paths) {
  std::vector<std::string> sorted = relative_paths;
  std::sort(sorted.begin(), sorted.end());
  auto os = open_out(dir + "/manifest.txt");
  for (const auto& rel : sorted) os << file_content_hash(dir + "/" + rel) << "  " << rel << '\n';
}

} // namespace mmrb
