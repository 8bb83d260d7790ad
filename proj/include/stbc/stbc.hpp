#pragma once

#include "stbc/types.hpp"
#include "stbc/lindesign.hpp"
#include "stbc/rotations.hpp"
#include "stbc/constructions.hpp"
#include "stbc/channel.hpp"
#include "stbc/decoders.hpp"
#include "stbc/diversity.hpp"
#include "stbc/simharness.hpp"
#include "stbc/serialization.hpp"
#include "stbc/plot.hpp"
