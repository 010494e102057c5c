#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "optomech/backaction.hpp"
#include "optomech/estimation.hpp"
#include "optomech/langevin.hpp"
#include "optomech/modes.hpp"
#include "optomech/spectra.hpp"

namespace optomech {

// Shortest decimal form that round-trips.
std::string format_number(double v);

// Writes via a temporary file and rename. Throws Io naming the file.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// delta_over_kappa,power_w,gamma_eff_hz_fwhm,f_eff_hz,t_eff_k,cooling_ratio,stable
std::string sweep_csv(const std::vector<SweepRow>& rows);

// '#' comment lines (kind, note) followed by frequency_hz,psd
std::string spectrum_csv(const Spectrum& spectrum);
Spectrum parse_spectrum_csv(const std::string& text);

// time_s,x_m
std::string trace_csv(const TimeTrace& trace);

// Little-endian block: "OMTR", u32 version (1), f64 dt, u64 n, u64 seed, n x f64.
std::vector<unsigned char> encode_trace(const TimeTrace& trace);
TimeTrace decode_trace(const std::vector<unsigned char>& bytes);
void write_trace_binary(const std::filesystem::path& path, const TimeTrace& trace);
TimeTrace read_trace_binary(const std::filesystem::path& path);

// center_hz,fwhm_hz,area,offset,err_center,err_fwhm,err_area,converged
std::string fit_csv(const std::vector<LorentzianFit>& fits);

// x_m,y_m,mean_square_disp
std::string scan_csv(const ScanDataset& data);
ScanDataset parse_scan_csv(const std::string& text);

}  // namespace optomech
