#include "optomech/io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

namespace fs = std::filesystem;

namespace {

constexpr std::array<unsigned char, 4> kTraceMagic{'O', 'M', 'T', 'R'};
constexpr std::uint32_t kTraceVersion = 1;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <typename T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  require(pos + sizeof(T) <= in.size(), ErrorCode::Io, "truncated trace block");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{in[pos + i]} << (8 * i);
  pos += sizeof(T);
  T value;
  std::memcpy(&value, &bits, sizeof(T));
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  require(ec == std::errc{} && ptr == last, ErrorCode::Io, "malformed number '" + s + "'");
  return v;
}

const char* kind_name(SpectrumKind k) {
  return k == SpectrumKind::Displacement ? "displacement" : "pdh_readout";
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_text_file(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::Io, "cannot open " + tmp.string() + " for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) fail(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::Io, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "delta_over_kappa,power_w,gamma_eff_hz_fwhm,f_eff_hz,t_eff_k,cooling_ratio,stable\n";
  for (const auto& r : rows) {
    os << format_number(r.delta_over_kappa) << ',' << format_number(r.power_w) << ','
       << format_number(r.gamma_eff_hz_fwhm) << ',' << format_number(r.f_eff_hz) << ','
       << format_number(r.t_eff_k) << ',' << format_number(r.cooling_ratio) << ','
       << (r.stable ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string spectrum_csv(const Spectrum& spectrum) {
  std::ostringstream os;
  os << "# kind=" << kind_name(spectrum.kind) << '\n';
  if (!spectrum.note.empty()) os << "# note=" << spectrum.note << '\n';
  os << "frequency_hz,psd\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    os << format_number(spectrum.frequency_hz[i]) << ',' << format_number(spectrum.values[i])
       << '\n';
  }
  return os.str();
}

Spectrum parse_spectrum_csv(const std::string& text) {
  Spectrum s;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# kind=pdh_readout", 0) == 0) s.kind = SpectrumKind::PdhReadout;
      if (line.rfind("# note=", 0) == 0) s.note = line.substr(7);
      continue;
    }
    if (!header) {
      require(line == "frequency_hz,psd", ErrorCode::Io, "unexpected spectrum header: " + line);
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    require(cells.size() == 2, ErrorCode::Io, "spectrum rows need two columns");
    s.frequency_hz.push_back(to_double(cells[0]));
    s.values.push_back(to_double(cells[1]));
  }
  require(header, ErrorCode::Io, "missing spectrum header");
  return s;
}

std::string trace_csv(const TimeTrace& trace) {
  std::ostringstream os;
  os << "time_s,x_m\n";
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    os << format_number(static_cast<double>(i) * trace.dt) << ','
       << format_number(trace.samples[i]) << '\n';
  }
  return os.str();
}

std::vector<unsigned char> encode_trace(const TimeTrace& trace) {
  std::vector<unsigned char> out(kTraceMagic.begin(), kTraceMagic.end());
  out.reserve(32 + 8 * trace.samples.size());
  put_le(out, kTraceVersion);
  put_le(out, trace.dt);
  put_le(out, static_cast<std::uint64_t>(trace.samples.size()));
  put_le(out, trace.seed);
  for (double v : trace.samples) put_le(out, v);
  return out;
}

TimeTrace decode_trace(const std::vector<unsigned char>& bytes) {
  require(bytes.size() >= 4 && std::equal(kTraceMagic.begin(), kTraceMagic.end(), bytes.begin()),
          ErrorCode::Io, "not a trace block");
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  require(version == kTraceVersion, ErrorCode::Io, "unsupported trace version");
  TimeTrace t;
  t.dt = get_le<double>(bytes, pos);
  const auto n = get_le<std::uint64_t>(bytes, pos);
  t.seed = get_le<std::uint64_t>(bytes, pos);
  require(bytes.size() - pos == 8 * n, ErrorCode::Io, "trace block length mismatch");
  t.samples.resize(n);
  for (auto& v : t.samples) v = get_le<double>(bytes, pos);
  return t;
}

void write_trace_binary(const fs::path& path, const TimeTrace& trace) {
  const auto bytes = encode_trace(trace);
  write_text_file(path, std::string(bytes.begin(), bytes.end()));
}

TimeTrace read_trace_binary(const fs::path& path) {
  const std::string s = read_text_file(path);
  return decode_trace(std::vector<unsigned char>(s.begin(), s.end()));
}

std::string fit_csv(const std::vector<LorentzianFit>& fits) {
  std::ostringstream os;
  os << "center_hz,fwhm_hz,area,offset,err_center,err_fwhm,err_area,converged\n";
  for (const auto& f : fits) {
    os << format_number(f.center_hz) << ',' << format_number(f.fwhm_hz) << ','
       << format_number(f.area) << ',' << format_number(f.offset) << ','
       << format_number(f.err_center) << ',' << format_number(f.err_fwhm) << ','
       << format_number(f.err_area) << ',' << (f.converged ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string scan_csv(const ScanDataset& data) {
  std::ostringstream os;
  os << "x_m,y_m,mean_square_disp\n";
  for (const auto& p : data) {
    os << format_number(p.x_m) << ',' << format_number(p.y_m) << ','
       << format_number(p.mean_square_disp) << '\n';
  }
  return os.str();
}

ScanDataset parse_scan_csv(const std::string& text) {
  ScanDataset out;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      require(line == "x_m,y_m,mean_square_disp", ErrorCode::Io, "unexpected scan header: " + line);
      header = true;
      continue;
    }
    const auto cells = split(line, ',');
    require(cells.size() == 3, ErrorCode::Io, "scan rows need three columns");
    out.push_back({to_double(cells[0]), to_double(cells[1]), to_double(cells[2])});
  }
  require(header, ErrorCode::Io, "missing scan header");
  return out;
}

}  // namespace optomech
