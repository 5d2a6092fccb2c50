#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attnswap/types.hpp"

namespace attnswap {

enum class Dedup {
    FirstFixation,  // refixations on an already-indexed element are ignored
    EveryFixation,  // every fixation advances the index; elements may repeat
};

struct IndexedAttention {
    std::string participant_id;
    std::string page_id;
    std::string element_id;
    Modality modality = Modality::Text;
    int fixation_index = 0;  // 1-based, consecutive per (participant, page, modality)
};

struct PairRow {
    std::string text_element_id;
    std::string image_element_id;
    std::string participant_id;
    std::string page_id;
    int fixation_index = 0;
};

using PairedDataset = std::vector<PairRow>;

// Ranks attended elements per (participant, page, modality) in order of first
// fixation. Events must be grouped-sorted by onset within each session;
// a decreasing onset raises UnsortedInput. Modality is looked up from
// `elements`; an unknown element_id raises DanglingReference.
std::vector<IndexedAttention> assign_fixation_indices(
    const std::vector<AttendedEvent>& events, const std::vector<Element>& elements,
    Dedup dedup = Dedup::FirstFixation);

// Pairs the text and image element holding the same fixation index within
// each (participant, page) session, pooled over all sessions.
PairedDataset build_pairs(const std::vector<IndexedAttention>& indexed);

}  // namespace attnswap
