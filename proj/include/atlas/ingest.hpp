#pragma once

// File ingestion: taxonomy configs (JSON), instance records (JSONL) and
// precomputed slice scores (CSV), plus the surface CSV writer. Two ingestion
// paths exist because raw per-instance data and published aggregate tables
// enter the pipeline at different levels.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/core.hpp"
#include "atlas/metrics.hpp"

namespace atlas {

TaxonomyConfig load_taxonomy(const std::filesystem::path& path);
TaxonomyConfig parse_taxonomy(std::string_view json_text);

// One InstanceRecord per JSONL line. Unreadable lines become diagnostics
// ("line N: ..."), not exceptions; an unknown component is still an error.
std::vector<InstanceRecord> read_instance_records(const std::filesystem::path& path,
                                                  const TaxonomyConfig& config,
                                                  std::vector<std::string>& diagnostics);

struct IngestOptions {
    bool parallel = true;  // score records with OpenMP; grouping stays ordered
};

// Scores every record with its component's metric, groups by
// (model, component, slice), applies the configured estimator and scales to
// the 0-100 reporting units. Scorer diagnostics (unparseable payloads) are
// appended; estimator preconditions throw.
ScoreSurface ingest_instances(const std::vector<InstanceRecord>& records,
                              const TaxonomyConfig& config,
                              std::vector<std::string>& diagnostics,
                              const IngestOptions& options = {});

ScoreSurface ingest_instances(const std::filesystem::path& path, const TaxonomyConfig& config,
                              std::vector<std::string>& diagnostics,
                              const IngestOptions& options = {});

// CSV with header model,dimension,component,slice,mean,variance,n (slice empty
// for holistic rows). A missing variance column defaults to 0 with a warning.
ScoreSurface ingest_slice_scores(const std::filesystem::path& path, const TaxonomyConfig& config,
                                 std::vector<std::string>* warnings = nullptr);
ScoreSurface parse_slice_scores(std::string_view csv_text, const TaxonomyConfig& config,
                                std::vector<std::string>* warnings = nullptr);

// Full-precision (round-trip exact) surface serialization.
std::string surface_to_csv(const ScoreSurface& surface);
void write_slice_scores(const ScoreSurface& surface, const std::filesystem::path& path);

// Small CSV helpers shared with the report readers.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// Stable 64-bit FNV-1a digest, hex encoded; used for config hashes.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace atlas
