#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace attnswap {

struct Viewport {
    int width_px = 1680;
    int height_px = 1050;
};

enum class Modality { Text, Image };

const char* modality_name(Modality m);
Modality modality_from_name(const std::string& name);

struct BBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return w * h; }

    // Half-open rectangle: left/top edges inside, right/bottom edges outside.
    bool contains(double px, double py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
};

struct Element {
    std::string element_id;
    std::string page_id;
    Modality modality = Modality::Text;
    BBox bbox;
    std::map<std::string, std::string> style_attrs;  // Text only
    std::string raster_ref;                          // Image only
    int z_order = 0;
};

struct Page {
    std::string page_id;
    Viewport viewport;
    std::string screenshot_ref;
};

struct Fixation {
    std::string participant_id;
    std::string page_id;
    double x = 0.0;
    double y = 0.0;
    std::int64_t onset_ms = 0;
    std::int64_t duration_ms = 0;
};

struct AttendedEvent {
    std::string participant_id;
    std::string page_id;
    std::string element_id;
    std::int64_t onset_ms = 0;
};

struct Corpus {
    std::string root;
    std::vector<Page> pages;
    std::vector<Element> elements;
    std::vector<Fixation> fixations;

    const Page* find_page(const std::string& page_id) const;
    const Element* find_element(const std::string& element_id) const;
};

}  // namespace attnswap
