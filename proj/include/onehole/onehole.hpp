#pragma once

#include "onehole/error.hpp"
#include "onehole/mobius.hpp"
#include "onehole/lie.hpp"
#include "onehole/cover.hpp"
#include "onehole/character.hpp"
#include "onehole/twist.hpp"
#include "onehole/fiber.hpp"
#include "onehole/experiment.hpp"
#include "onehole/verify.hpp"
