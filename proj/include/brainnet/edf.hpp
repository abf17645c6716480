// Copyright 2026 The Brainnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// European Data Format reader. The format is a 256-byte fixed ASCII header,
// then 256 bytes of ASCII per signal (field arrays grouped by field, not by
// signal), then data records of 16-bit little-endian two's-complement
// samples interleaved signal by signal.

#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "brainnet/errors.hpp"

namespace brainnet {

enum class ClassLabel : std::uint8_t { control = 0, insomnia = 1 };

inline const char* to_string(ClassLabel l) {
  return l == ClassLabel::insomnia ? "insomnia" : "control";
}

namespace edf {

struct EdfHeader {
  std::string version;
  std::string patient_info;
  std::string recording_info;
  std::string start_date;  // dd.mm.yy
  std::string start_time;  // hh.mm.ss
  std::string reserved;
  long header_bytes = 0;
  long long n_data_records = -1;  // as declared; -1 means "unknown"
  double record_duration = 0.0;   // seconds
  int n_signals = 0;

  std::string start_datetime() const { return start_date + " " + start_time; }
};

struct SignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  std::string prefiltering;
  std::string reserved;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = 0;
  int digital_max = 0;
  int samples_per_record = 0;

  bool is_annotation() const { return label == "EDF Annotations"; }
};

struct Channel {
  std::string label;
  double sample_rate = 0.0;  // Hz
  std::vector<double> samples;
};

struct Recording {
  std::string subject_id;                  // assigned from the manifest, never from the file
  std::optional<ClassLabel> class_label;   // likewise
  std::vector<Channel> channels;
};

struct EdfFile {
  EdfHeader header;
  std::vector<SignalHeader> signals;
  Recording recording;
  std::size_t n_records_read = 0;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct Cursor {
  std::string_view buf;
  std::size_t pos = 0;

  std::string_view take(std::size_t n, const char* what) {
    if (pos + n > buf.size())
      throw TruncatedHeader(std::string("header ends inside field '") + what + "'");
    std::string_view out = buf.substr(pos, n);
    pos += n;
    return out;
  }
};

inline double parse_double_field(std::string_view raw, const char* what) {
  const std::string t = trim(raw);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || t.empty())
    throw MalformedField(std::string("field '") + what + "' is not a number: \"" + t + "\"");
  return v;
}

inline long long parse_int_field(std::string_view raw, const char* what) {
  const std::string t = trim(raw);
  long long v = 0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || t.empty())
    throw MalformedField(std::string("field '") + what + "' is not an integer: \"" + t + "\"");
  return v;
}

}  // namespace detail

// Lowercased with all whitespace removed; used wherever channel labels are
// compared ("C4-A1 " matches "c4-a1").
inline std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Parses the fixed header plus per-signal headers from the front of `bytes`.
// Throws TruncatedHeader / MalformedField.
inline std::pair<EdfHeader, std::vector<SignalHeader>> parse_edf_headers(std::string_view bytes) {
  using namespace detail;
  Cursor cur{bytes};

  EdfHeader h;
  h.version = trim(cur.take(8, "version"));
  h.patient_info = trim(cur.take(80, "patient"));
  h.recording_info = trim(cur.take(80, "recording"));
  h.start_date = trim(cur.take(8, "start date"));
  h.start_time = trim(cur.take(8, "start time"));
  h.header_bytes = static_cast<long>(parse_int_field(cur.take(8, "header bytes"), "header bytes"));
  h.reserved = trim(cur.take(44, "reserved"));
  h.n_data_records = parse_int_field(cur.take(8, "data record count"), "data record count");
  h.record_duration = parse_double_field(cur.take(8, "record duration"), "record duration");
  h.n_signals = static_cast<int>(parse_int_field(cur.take(4, "signal count"), "signal count"));

  if (h.reserved.rfind("EDF+D", 0) == 0)
    throw MalformedField("discontinuous recordings (EDF+D) are not supported");
  if (h.n_signals < 0)
    throw MalformedField("negative signal count");
  if (h.header_bytes != 256 * (static_cast<long>(h.n_signals) + 1))
    throw MalformedField("header byte count " + std::to_string(h.header_bytes) +
                         " does not match signal count " + std::to_string(h.n_signals));
  if (h.n_data_records < -1)
    throw MalformedField("data record count " + std::to_string(h.n_data_records));
  if (!(h.record_duration > 0.0))
    throw MalformedField("record duration must be positive");

  const std::size_t ns = static_cast<std::size_t>(h.n_signals);
  std::vector<SignalHeader> sigs(ns);
  for (auto& s : sigs) s.label = trim(cur.take(16, "label"));
  for (auto& s : sigs) s.transducer = trim(cur.take(80, "transducer"));
  for (auto& s : sigs) s.physical_dimension = trim(cur.take(8, "physical dimension"));
  for (auto& s : sigs)
    s.physical_min = parse_double_field(cur.take(8, "physical min"), "physical min");
  for (auto& s : sigs)
    s.physical_max = parse_double_field(cur.take(8, "physical max"), "physical max");
  for (auto& s : sigs)
    s.digital_min = static_cast<int>(parse_int_field(cur.take(8, "digital min"), "digital min"));
  for (auto& s : sigs)
    s.digital_max = static_cast<int>(parse_int_field(cur.take(8, "digital max"), "digital max"));
  for (auto& s : sigs) s.prefiltering = trim(cur.take(80, "prefiltering"));
  for (auto& s : sigs) {
    s.samples_per_record =
        static_cast<int>(parse_int_field(cur.take(8, "samples per record"), "samples per record"));
    if (s.samples_per_record < 1)
      throw MalformedField("samples per record must be >= 1 for signal '" + s.label + "'");
  }
  for (auto& s : sigs) s.reserved = trim(cur.take(32, "signal reserved"));

  for (const auto& s : sigs) {
    if (s.digital_min == s.digital_max)
      throw DegenerateScaling("digital min equals digital max for signal '" + s.label + "'");
    if (s.physical_min == s.physical_max)
      throw DegenerateScaling("physical min equals physical max for signal '" + s.label + "'");
  }
  return {std::move(h), std::move(sigs)};
}

// digital -> physical linear map
inline double to_physical(int digital, const SignalHeader& s) {
  return s.physical_min + (static_cast<double>(digital) - static_cast<double>(s.digital_min)) *
                              (s.physical_max - s.physical_min) /
                              (static_cast<double>(s.digital_max) - static_cast<double>(s.digital_min));
}

inline EdfFile parse_edf(std::string_view bytes) {
  EdfFile out;
  auto [hdr, sigs] = parse_edf_headers(bytes);
  out.header = std::move(hdr);
  out.signals = std::move(sigs);

  const std::size_t header_end = static_cast<std::size_t>(out.header.header_bytes);
  std::size_t record_size = 0;
  for (const auto& s : out.signals)
    record_size += static_cast<std::size_t>(s.samples_per_record) * 2;

  const std::size_t avail_bytes = bytes.size() - header_end;
  const std::size_t whole_records = record_size == 0 ? 0 : avail_bytes / record_size;
  std::size_t n_records;
  if (out.header.n_data_records == -1) {
    n_records = whole_records;  // count recovered from the byte length
  } else {
    n_records = static_cast<std::size_t>(out.header.n_data_records);
    if (whole_records < n_records)
      throw TruncatedRecords("file ends after " + std::to_string(whole_records) + " of " +
                                 std::to_string(n_records) + " data records",
                             whole_records);
  }
  out.n_records_read = n_records;

  out.recording.channels.reserve(out.signals.size());
  for (const auto& s : out.signals) {
    if (s.is_annotation()) continue;
    Channel c;
    c.label = s.label;
    c.sample_rate = static_cast<double>(s.samples_per_record) / out.header.record_duration;
    c.samples.reserve(n_records * static_cast<std::size_t>(s.samples_per_record));
    out.recording.channels.push_back(std::move(c));
  }

  const unsigned char* p = reinterpret_cast<const unsigned char*>(bytes.data()) + header_end;
  for (std::size_t r = 0; r < n_records; ++r) {
    std::size_t ch = 0;
    for (const auto& s : out.signals) {
      const std::size_t n = static_cast<std::size_t>(s.samples_per_record);
      if (s.is_annotation()) {
        p += n * 2;
        continue;
      }
      Channel& c = out.recording.channels[ch++];
      for (std::size_t i = 0; i < n; ++i) {
        const std::int16_t d =
            static_cast<std::int16_t>(static_cast<std::uint16_t>(p[0]) |
                                      (static_cast<std::uint16_t>(p[1]) << 8));
        c.samples.push_back(to_physical(d, s));
        p += 2;
      }
    }
  }
  return out;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline EdfFile parse_edf_file(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  return parse_edf(bytes);
}

// Header-only read for cheap validation of large files.
inline std::pair<EdfHeader, std::vector<SignalHeader>> parse_edf_headers_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::string head(256, '\0');
  in.read(head.data(), 256);
  if (in.gcount() < 256) throw TruncatedHeader("file shorter than 256 bytes");
  const long hb = static_cast<long>(
      detail::parse_int_field(std::string_view(head).substr(184, 8), "header bytes"));
  if (hb < 256) throw MalformedField("header byte count " + std::to_string(hb));
  std::string full(static_cast<std::size_t>(hb), '\0');
  std::copy(head.begin(), head.end(), full.begin());
  in.read(full.data() + 256, hb - 256);
  if (in.gcount() < hb - 256) throw TruncatedHeader("file shorter than declared header");
  return parse_edf_headers(full);
}

// Returns the wanted channels, in wanted order. Matching is case-insensitive
// and ignores whitespace.
inline Recording select_channels(const Recording& rec, const std::vector<std::string>& wanted) {
  Recording out;
  out.subject_id = rec.subject_id;
  out.class_label = rec.class_label;
  out.channels.reserve(wanted.size());
  for (const auto& w : wanted) {
    const std::string key = normalize_label(w);
    const Channel* found = nullptr;
    for (const auto& c : rec.channels) {
      if (normalize_label(c.label) == key) {
        found = &c;
        break;
      }
    }
    if (!found) throw MissingChannel("channel '" + w + "' not present in recording", w);
    out.channels.push_back(*found);
  }
  return out;
}

// --- subject manifest ---
// CSV with a required header row: file_path,subject_id,class_label

struct ManifestEntry {
  std::string file_path;
  std::string subject_id;
  ClassLabel class_label = ClassLabel::control;
};

inline ClassLabel parse_class_label(std::string_view s) {
  const std::string t = normalize_label(s);
  if (t == "insomnia") return ClassLabel::insomnia;
  if (t == "control") return ClassLabel::control;
  throw MalformedField("class label must be 'insomnia' or 'control', got \"" + std::string(s) +
                       "\"");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<ManifestEntry> load_manifest(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw MalformedField("manifest is empty (header row required)");
  {
    auto cols = split_csv_line(line);
    for (auto& c : cols) c = detail::trim(c);
    if (cols.size() != 3 || cols[0] != "file_path" || cols[1] != "subject_id" ||
        cols[2] != "class_label")
      throw MalformedField("manifest header must be: file_path,subject_id,class_label");
  }
  std::vector<ManifestEntry> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cols = split_csv_line(line);
    if (cols.size() != 3)
      throw MalformedField("manifest line " + std::to_string(lineno) + ": expected 3 fields");
    ManifestEntry e;
    e.file_path = detail::trim(cols[0]);
    e.subject_id = detail::trim(cols[1]);
    e.class_label = parse_class_label(cols[2]);
    if (e.file_path.empty() || e.subject_id.empty())
      throw MalformedField("manifest line " + std::to_string(lineno) + ": empty field");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<ManifestEntry> load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());
  return load_manifest(in);
}

}  // namespace edf
}  // namespace brainnet
