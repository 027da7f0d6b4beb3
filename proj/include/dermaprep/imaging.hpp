#pragma once

#include "dermaprep/image.hpp"

namespace dermaprep {

// Segmentation-network operating size.
inline constexpr int kStackSize = 380;
inline constexpr int kStackChannels = 7;

// Hexcone HSV, all three channels in [0,1] (hue = angle / 360). Gray pixels
// get hue 0 and saturation 0.
Image rgb_to_hsv(const Image& rgb);

// CIELUV L* (D65 white, sRGB primaries) scaled from [0,100] to [0,1].
Image luminance_luv(const Image& rgb);

// Bilinear resampling with pixel-centre alignment and edge clamping.
// Same-size resize returns an exact copy.
Image resize(const Image& img, int width, int height);

// Affine per-channel normalisation x' = (x - 0.5) / 0.5.
Image normalize_half(const Image& img);

// Concatenates channels of equally-sized images.
Image concat_channels(const Image& a, const Image& b);

// 7-channel network input: channels [R,G,B,H,S,V,L] computed at native
// resolution, resized to 380x380, then normalised to [-1,1].
Image stack_seven(const Image& rgb);

}  // namespace dermaprep
