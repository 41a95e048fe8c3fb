#pragma once

#include "floweval/types.hpp"

namespace floweval::detail {

// Throws BadRegion when the rectangle does not fit a frame_w x frame_h frame.
void check_rect(int frame_w, int frame_h, const Rect& r);

}  // namespace floweval::detail
