"""
OAM Lens Toolkit
UCA 涡旋波束建模、发散角拟合、单焦/双焦透镜设计与链路容量分析
"""

__version__ = "1.0.0"
