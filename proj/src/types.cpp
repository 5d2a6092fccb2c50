#include "attnswap/types.hpp"

#include <algorithm>

#include "attnswap/error.hpp"

namespace attnswap {

const char* modality_name(Modality m) {
    return m == Modality::Text ? "text" : "image";
}

Modality modality_from_name(const std::string& name) {
    if (name == "text") return Modality::Text;
    if (name == "image") return Modality::Image;
    fail(ErrorCode::SchemaViolation, "modality must be \"text\" or \"image\", got \"" + name + "\"");
}

const Page* Corpus::find_page(const std::string& page_id) const {
    auto it = std::find_if(pages.begin(), pages.end(),
                           [&](const Page& p) { return p.page_id == page_id; });
    return it == pages.end() ? nullptr : &*it;
}

const Element* Corpus::find_element(const std::string& element_id) const {
    auto it = std::find_if(elements.begin(), elements.end(),
                           [&](const Element& e) { return e.element_id == element_id; });
    return it == elements.end() ? nullptr : &*it;
}

}  // namespace attnswap
