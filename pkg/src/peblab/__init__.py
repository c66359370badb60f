"""peblab: pebble games, pebbling-contradiction formulas, and resolution
proof machinery at desk scale."""

__version__ = "0.1.0"
