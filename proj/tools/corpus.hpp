#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "multiphonic/synthesis.hpp"

namespace mph::tools {

struct CorpusTone {
  std::string id;
  ToneSpec spec;
};

struct CorpusFile {
  std::string path;  // relative to the corpus root
  std::string content;
};

std::vector<CorpusTone> corpus_tones();

/// Listener reports and tracker traces that accompany the tones.
std::vector<CorpusFile> corpus_tables();

/// Writes tones/<id>.json, tones/<id>.wav and the tables under `root`.
/// Returns the written paths in a stable order.
std::vector<std::filesystem::path> write_corpus(const std::filesystem::path& root);

}  // namespace mph::tools
