"""Test package"""

