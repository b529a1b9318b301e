#pragma once

#include <string>
#include <vector>

#include "g2ldp/controls.hpp"
#include "g2ldp/field.hpp"
#include "g2ldp/trajectory.hpp"

namespace g2ldp {

/// Repeatable shortest round-trip formatting (%.17g).
std::string format_double(double v);

/// CSV rows of (k1, k2, Re u, Im u) with a header documenting N, L, alpha.
void write_field_csv(const std::string& path, const SpectralField& u, double alpha);
SpectralField read_field_csv(const std::string& path);

/// Flat little-endian binary: magic, version, N, L, alpha, then
/// (int32 k1, int32 k2, double re, double im) per retained mode.
void write_field_binary(const std::string& path, const SpectralField& u, double alpha);
SpectralField read_field_binary(const std::string& path);

/// (t_start, t_end, value) rows.
void write_scalar_control_csv(const std::string& path, const ScalarControl& f);
ScalarControl read_scalar_control_csv(const std::string& path);

/// (t_start, t_end, mark_index, value) rows; mark_index is 1-based on disk.
void write_intensity_control_csv(const std::string& path, const IntensityControl& g);
IntensityControl read_intensity_control_csv(const std::string& path);

/// (index, label, weight) rows; index is 1-based on disk.
void write_mark_space_csv(const std::string& path, const MarkSpace& z);
MarkSpace read_mark_space_csv(const std::string& path);

/// (t, norm_v, norm_w, residual) rows; residual column is 0 when absent.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Generic table writer: one header line, then rows of formatted doubles.
void write_table_csv(const std::string& path, const std::string& header,
                     const std::vector<std::vector<double>>& rows);

}  // namespace g2ldp
