#ifndef EVIDENCER_FORMATS_H_
#define EVIDENCER_FORMATS_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "evidencer/annotator.h"
#include "evidencer/labeling.h"
#include "evidencer/query.h"
#include "evidencer/ranker.h"

// Readers and writers for the pipeline's interchange files. Every writer is
// deterministic: equal inputs give byte-identical files.
namespace evidencer::formats {

// RFC 4180 fields without embedded newlines.
std::vector<std::string> parse_csv_line(std::string_view line, size_t line_no);
std::string csv_escape(std::string_view field);
std::string csv_join(const std::vector<std::string> &fields);

// Reads a CSV with the exact header `expected`; returns data rows.
std::vector<std::vector<std::string>> read_csv(std::istream &in,
                                               const std::vector<std::string> &expected,
                                               const std::string &what);
std::vector<std::vector<std::string>> read_csv_file(const std::filesystem::path &path,
                                                    const std::vector<std::string> &expected);

void write_text_file(const std::filesystem::path &path, const std::string &content);

// Shortest round-trip decimal form.
std::string format_double(double v);
double parse_double(std::string_view s);
uint32_t parse_u32(std::string_view s);

// motion_id,text,topic,action
std::vector<Motion> read_motions(const std::filesystem::path &path, const RedirectTable &table);

// JSON lines: {"motion_id","doc_id","sent_idx","evidence_type","query_id","spans"}
std::string format_candidates(std::span<const Candidate> candidates);
std::vector<Candidate> read_candidates(const std::filesystem::path &path);

// motion_id,rank,doc_id,sent_idx,score,evidence_type,query_id
std::string format_ranking(std::span<const ScoredCandidate> ranked);
std::vector<ScoredCandidate> read_ranking(const std::filesystem::path &path);

// motion_id,doc_id,sent_idx,annotator_id,label   (label: pos | neg)
std::string format_label_records(std::span<const LabelRecord> records);
std::vector<LabelRecord> read_label_records(const std::filesystem::path &path);

// motion_id,doc_id,sent_idx
std::string format_needs_labels(std::span<const UnderLabeled> pairs);

// iteration,motion_id,doc_id,sent_idx,gold
std::string format_snapshot(const DatasetSnapshot &snapshot);

// motion_id,doc_id,sent_idx,gold. read_gold also accepts snapshot files.
std::string format_gold(std::span<const AggregatedLabel> labels);
std::map<PairKey, bool> read_gold(const std::filesystem::path &path);

}  // namespace evidencer::formats

#endif  // EVIDENCER_FORMATS_H_
